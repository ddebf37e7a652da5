#include <geohub/parallel.hpp>

#include <cstdlib>
#include <string>

namespace geohub {

int resolve_workers(int requested) {
    int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    if (const char* env = std::getenv("GEOHUB_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) workers = std::min(workers, cap);
        } catch (const std::exception&) {
            // unparsable cap is ignored
        }
    }
    return workers;
}

}  // namespace geohub
