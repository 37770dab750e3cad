#include "satsim/engine.hpp"

#include <algorithm>
#include <future>

namespace satsim::engine {

std::vector<DropResult> run_campaign(const ScenarioConfig& cfg, Stack stack, Direction direction,
                                     const RunHooks& hooks)
{
    cfg.validate();
    const int n = cfg.drops.count;
    std::vector<DropResult> out(static_cast<std::size_t>(n));
    // Observers are caller state; keep them on one thread.
    const int threads = hooks.pf_observer ? 1 : std::min(cfg.drops.threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = run_drop(cfg, stack, direction, drop_config(cfg, i), hooks);
        }
        return out;
    }
    for (int first = 0; first < n; first += threads) {
        std::vector<std::future<DropResult>> batch;
        for (int i = first; i < std::min(n, first + threads); ++i) {
            batch.push_back(std::async(std::launch::async, [&cfg, stack, direction, &hooks, i] {
                return run_drop(cfg, stack, direction, drop_config(cfg, i), hooks);
            }));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) {
            out[static_cast<std::size_t>(first) + k] = batch[k].get();
        }
    }
    return out;
}

} // namespace satsim::engine
