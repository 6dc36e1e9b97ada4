#pragma once

#include <stdexcept>
#include <string>

namespace oflm {

// Coarse classes map onto CLI exit codes (2, 3, 4).
enum class ErrorClass { config, numerical, hypothesis };

class Error : public std::runtime_error {
public:
    Error(std::string name, ErrorClass cls, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)), cls_(cls) {}

    const std::string& name() const noexcept { return name_; }
    ErrorClass error_class() const noexcept { return cls_; }

private:
    std::string name_;
    ErrorClass cls_;
};

int exit_code_for(ErrorClass cls) noexcept;

#define OFLM_DECLARE_ERROR(Name, Class)                                        \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, Class, what) {}  \
    };

// matfun
OFLM_DECLARE_ERROR(EigenvalueOutOfRange, ErrorClass::config)
OFLM_DECLARE_ERROR(NonDiagonalizableWithoutJordanInput, ErrorClass::config)
OFLM_DECLARE_ERROR(NonPositiveBase, ErrorClass::config)
OFLM_DECLARE_ERROR(PoleOfGamma, ErrorClass::numerical)
OFLM_DECLARE_ERROR(UnsupportedStructure, ErrorClass::config)
// kernels / quadrature
OFLM_DECLARE_ERROR(GridTooCoarse, ErrorClass::numerical)
OFLM_DECLARE_ERROR(QuadratureNotConverged, ErrorClass::numerical)
// levy
OFLM_DECLARE_ERROR(RadialQuadratureDiverged, ErrorClass::numerical)
OFLM_DECLARE_ERROR(FirstMomentDiverged, ErrorClass::numerical)
OFLM_DECLARE_ERROR(UnsupportedPushforward, ErrorClass::config)
OFLM_DECLARE_ERROR(IncomparableVariants, ErrorClass::config)
OFLM_DECLARE_ERROR(TruncationRequired, ErrorClass::config)
// simulate
OFLM_DECLARE_ERROR(WindowTooSmall, ErrorClass::numerical)
OFLM_DECLARE_ERROR(NotPSD, ErrorClass::numerical)
// mcstats
OFLM_DECLARE_ERROR(TimesNotOnGrid, ErrorClass::config)
OFLM_DECLARE_ERROR(DegenerateVariance, ErrorClass::numerical)
// covariance
OFLM_DECLARE_ERROR(RankDeficientMoment, ErrorClass::numerical)
OFLM_DECLARE_ERROR(UnlinkedParams, ErrorClass::config)
// timerev
OFLM_DECLARE_ERROR(SingularM, ErrorClass::hypothesis)
OFLM_DECLARE_ERROR(SingularA, ErrorClass::hypothesis)
OFLM_DECLARE_ERROR(RankDeficientSigma, ErrorClass::hypothesis)
OFLM_DECLARE_ERROR(MismatchedEnsembles, ErrorClass::config)
// limits
OFLM_DECLARE_ERROR(HypothesisViolated, ErrorClass::hypothesis)
OFLM_DECLARE_ERROR(NonCommutingUnsupported, ErrorClass::hypothesis)
OFLM_DECLARE_ERROR(FourthMomentDiverged, ErrorClass::numerical)
// cli
OFLM_DECLARE_ERROR(SchemaError, ErrorClass::config)
OFLM_DECLARE_ERROR(ValidationError, ErrorClass::config)

#undef OFLM_DECLARE_ERROR

}  // namespace oflm
