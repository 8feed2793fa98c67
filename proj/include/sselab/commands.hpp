#pragma once

#include <string>

namespace sselab {

struct CommandOptions {
    std::string config_path;
    std::string out_dir = "out";
    bool enforce = false;  // command-line --enforce; OR-ed with the config flag
    bool traj_csv = false; // write per-trajectory CSV files
};

// Exit codes: 0 all enabled checks pass, 2 check flags raised, 3 non-unique
// steady state under --enforce, 1 usage/config errors (thrown as exceptions
// and mapped by the CLI driver).
int cmd_simulate(const CommandOptions& opt);
int cmd_compare(const CommandOptions& opt);
int cmd_criteria(const CommandOptions& opt);
int cmd_steady(const CommandOptions& opt);

} // namespace sselab
