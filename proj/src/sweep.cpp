#include "platoon/sweep.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace platoon::sweep {

int thread_budget()
{
    if (const char* env = std::getenv("PLATOON_SIM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) {
            return static_cast<int>(n);
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<scenario::ScenarioResult> run_sweep(std::span<const scenario::ScenarioConfig> configs,
                                                int threads)
{
    if (threads <= 0) {
        threads = thread_budget();
    }
    const auto n = static_cast<std::int64_t>(configs.size());
    std::vector<scenario::ScenarioResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            results[k] = scenario::run_scenario(configs[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }

    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

std::vector<scenario::ScenarioResult>
run_sweep_serial(std::span<const scenario::ScenarioConfig> configs)
{
    std::vector<scenario::ScenarioResult> results;
    results.reserve(configs.size());
    for (const auto& cfg : configs) {
        results.push_back(scenario::run_scenario(cfg));
    }
    return results;
}

} // namespace platoon::sweep
