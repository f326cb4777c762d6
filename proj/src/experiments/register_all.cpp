#include "railsim/core/experiment.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

void register_all() {
    static bool done = false;
    if (done) return;
    done = true;
    register_channel();
    register_otfs();
    register_sched();
    register_access();
    register_fed();
    register_twin();
}

}  // namespace railsim::experiments
