#pragma once

#include <cstdint>
#include <string>

namespace bdns::analytics {

// Deployment-cost model for a subscription-run resolver on public-cloud
// machines. Egress uses decimal units (1 KB = 1000 B, 1 GB = 1e9 B).
struct CostInputs {
    double queries_per_user_day = 3724;
    double qps_capacity = 8;            // sustained queries/s per machine
    double machine_monthly_cost = 149;  // USD
    double egress_cost_per_gb = 0.09;   // USD
    double response_kb = 40;
    double burst_qps = 0;               // optional burst sizing
    double burst_users = 0;

    void validate() const;
};

struct CostReport {
    int64_t users_per_machine = 0;
    double compute_cost_per_user = 0;
    double egress_cost_per_user = 0;
    int64_t burst_machines = 0;         // 0 when burst sizing not requested
    double burst_compute_per_user = 0;

    std::string to_json() const;
};

CostReport cost_model(const CostInputs& in);

}  // namespace bdns::analytics
