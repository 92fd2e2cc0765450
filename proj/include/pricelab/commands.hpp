#pragma once

#include <string>
#include <vector>

namespace pricelab {

// CLI entry points, kept callable from tests. Each returns a process exit
// code; expected failures surface as pricelab::Error for the caller to print.

int cmd_estimate_lambda(const std::string& log_path, double window_minutes,
                        const std::string& out_path);

int cmd_simulate(const std::string& config_path, const std::string& out_dir);

int cmd_compare(const std::string& config_path, const std::vector<std::string>& policy_names,
                const std::string& out_path);

int cmd_fit_adp(const std::string& config_path, const std::string& out_path);

}  // namespace pricelab
