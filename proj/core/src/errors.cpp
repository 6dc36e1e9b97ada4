#include "oflm/errors.hpp"

namespace oflm {

int exit_code_for(ErrorClass cls) noexcept {
    switch (cls) {
        case ErrorClass::config: return 2;
        case ErrorClass::numerical: return 3;
        case ErrorClass::hypothesis: return 4;
    }
    return 1;
}

}  // namespace oflm
