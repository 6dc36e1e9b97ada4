#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oflm/simulate.hpp"

namespace oflm {

// 17 significant digits, round-trip exact.
std::string format_double(double x);

// "# config_digest=... seed=... replication=..." then t,X1..Xp rows.
void write_path_csv(std::ostream& os, const SamplePath& path);
// replication,t,X1..Xp
void write_ensemble_csv(std::ostream& os, const Ensemble& ens);

// Text header line, then float64 columns (t, X1..Xp), little endian.
void write_path_binary(std::ostream& os, const SamplePath& path);
SamplePath read_path_binary(std::istream& is);

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, const std::string& digest = {});
void write_matrix_csv(std::ostream& os, const Mat& m, const std::string& digest = {});

}  // namespace oflm
