#include "wft/numerics.hpp"

namespace wft::num {

const GaussLegendre<32>& gl32() {
    static const GaussLegendre<32> g;
    return g;
}

}  // namespace wft::num
