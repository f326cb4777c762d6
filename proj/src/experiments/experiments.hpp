#ifndef RAILSIM_EXPERIMENTS_EXPERIMENTS_HPP
#define RAILSIM_EXPERIMENTS_EXPERIMENTS_HPP

namespace railsim::experiments {

void register_channel();
void register_otfs();
void register_sched();
void register_access();
void register_fed();
void register_twin();

}  // namespace railsim::experiments

#endif
