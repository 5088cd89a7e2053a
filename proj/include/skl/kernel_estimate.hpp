#pragma once

#include "skl/regime.hpp"

namespace skl {

enum class KernelMethod { exact, tauberian, weyl, weyl_boundary, weyl_boundary_corrected };

// One kernel evaluation at a point pair, tagged with how it was produced and
// the trivial magnitude envelope at that pair.
struct KernelEstimate {
    double value = 0.0;
    KernelMethod method = KernelMethod::exact;
    RegimeTag regime;
    double envelope = 0.0;  // >= 0
};

const char* method_name(KernelMethod m);

}  // namespace skl
