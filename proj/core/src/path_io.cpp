#include "oflm/path_io.hpp"

#include <bit>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "oflm/errors.hpp"

namespace oflm {

static_assert(std::endian::native == std::endian::little, "binary path format assumes little endian");

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void digest_line(std::ostream& os, const std::string& digest) {
    if (!digest.empty()) os << "# config_digest=" << digest << '\n';
}

}  // namespace

void write_path_csv(std::ostream& os, const SamplePath& path) {
    os << "# config_digest=" << path.config_digest << " seed=" << path.seed
       << " replication=" << path.replication << '\n';
    const auto p = path.values.empty() ? 0 : path.values.front().size();
    os << 't';
    for (Eigen::Index k = 0; k < p; ++k) os << ",X" << k + 1;
    os << '\n';
    for (std::size_t j = 0; j < path.grid.size(); ++j) {
        os << format_double(path.grid[j]);
        for (Eigen::Index k = 0; k < p; ++k) os << ',' << format_double(path.values[j](k));
        os << '\n';
    }
}

void write_ensemble_csv(std::ostream& os, const Ensemble& ens) {
    digest_line(os, ens.config_digest);
    const auto p = ens.dim();
    os << "replication,t";
    for (Eigen::Index k = 0; k < p; ++k) os << ",X" << k + 1;
    os << '\n';
    for (const auto& path : ens.paths) {
        for (std::size_t j = 0; j < path.grid.size(); ++j) {
            os << path.replication << ',' << format_double(path.grid[j]);
            for (Eigen::Index k = 0; k < p; ++k) os << ',' << format_double(path.values[j](k));
            os << '\n';
        }
    }
}

void write_path_binary(std::ostream& os, const SamplePath& path) {
    const auto p = path.values.empty() ? 0 : path.values.front().size();
    const std::size_t rows = path.grid.size();
    os << "oflm-path v1 digest=" << (path.config_digest.empty() ? "-" : path.config_digest)
       << " seed=" << path.seed << " replication=" << path.replication << " rows=" << rows
       << " cols=" << p + 1 << '\n';
    os.write(reinterpret_cast<const char*>(path.grid.data()), static_cast<std::streamsize>(rows * sizeof(double)));
    for (Eigen::Index k = 0; k < p; ++k) {
        for (std::size_t j = 0; j < rows; ++j) {
            const double v = path.values[j](k);
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    }
}

SamplePath read_path_binary(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("missing binary path header");
    std::istringstream hs(line);
    std::string magic, version, tok;
    hs >> magic >> version;
    if (magic != "oflm-path" || version != "v1") throw ValidationError("not an oflm binary path");
    SamplePath sp;
    std::size_t rows = 0, cols = 0;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "digest") sp.config_digest = val == "-" ? "" : val;
        else if (key == "seed") sp.seed = std::stoull(val);
        else if (key == "replication") sp.replication = std::stoull(val);
        else if (key == "rows") rows = std::stoull(val);
        else if (key == "cols") cols = std::stoull(val);
    }
    if (cols == 0) throw ValidationError("binary path has no columns");
    sp.grid.resize(rows);
    is.read(reinterpret_cast<char*>(sp.grid.data()), static_cast<std::streamsize>(rows * sizeof(double)));
    sp.values.assign(rows, Vec::Zero(static_cast<Eigen::Index>(cols - 1)));
    for (std::size_t k = 0; k + 1 < cols; ++k) {
        for (std::size_t j = 0; j < rows; ++j) {
            double v;
            is.read(reinterpret_cast<char*>(&v), sizeof v);
            sp.values[j](static_cast<Eigen::Index>(k)) = v;
        }
    }
    if (!is) throw ValidationError("truncated binary path");
    return sp;
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, const std::string& digest) {
    digest_line(os, digest);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

void write_matrix_csv(std::ostream& os, const Mat& m, const std::string& digest) {
    digest_line(os, digest);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
        os << '\n';
    }
}

}  // namespace oflm
