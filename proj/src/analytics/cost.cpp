#include "bdns/analytics/cost.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bdns::analytics {

void CostInputs::validate() const {
    if (queries_per_user_day <= 0 || qps_capacity <= 0 || machine_monthly_cost <= 0 ||
        egress_cost_per_gb < 0 || response_kb <= 0)
        throw std::invalid_argument("cost inputs must be positive");
    if ((burst_qps > 0) != (burst_users > 0))
        throw std::invalid_argument("burst sizing needs both burst_qps and burst_users");
}

CostReport cost_model(const CostInputs& in) {
    in.validate();
    CostReport out;
    // daily capacity of one machine divided by per-user demand
    out.users_per_machine =
        std::llround(86400.0 * in.qps_capacity / in.queries_per_user_day);
    if (out.users_per_machine < 1) out.users_per_machine = 1;
    out.compute_cost_per_user =
        in.machine_monthly_cost / static_cast<double>(out.users_per_machine);
    out.egress_cost_per_user = in.queries_per_user_day * 30.0 * in.response_kb * 1000.0 /
                               1e9 * in.egress_cost_per_gb;
    if (in.burst_qps > 0) {
        out.burst_machines = static_cast<int64_t>(std::ceil(in.burst_qps / in.qps_capacity));
        out.burst_compute_per_user = static_cast<double>(out.burst_machines) *
                                     in.machine_monthly_cost / in.burst_users;
    }
    return out;
}

std::string CostReport::to_json() const {
    nlohmann::json j{{"users_per_machine", users_per_machine},
                     {"compute_cost_per_user", compute_cost_per_user},
                     {"egress_cost_per_user", egress_cost_per_user},
                     {"burst_machines", burst_machines},
                     {"burst_compute_per_user", burst_compute_per_user}};
    return j.dump(2);
}

}  // namespace bdns::analytics
