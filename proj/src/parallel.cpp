#include "dcsim/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dcsim {

int default_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DCSIM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace dcsim
