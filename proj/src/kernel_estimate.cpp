#include "skl/kernel_estimate.hpp"

namespace skl {

const char* method_name(KernelMethod m) {
    switch (m) {
        case KernelMethod::exact: return "exact";
        case KernelMethod::tauberian: return "tauberian";
        case KernelMethod::weyl: return "weyl";
        case KernelMethod::weyl_boundary: return "weyl_boundary";
        case KernelMethod::weyl_boundary_corrected: return "weyl_boundary_corrected";
    }
    return "?";
}

}  // namespace skl
