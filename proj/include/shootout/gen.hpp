#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "shootout/domain.hpp"

namespace shootout {

// Synthetic season generator: the 1989 dataset does not ship, so acceptance
// runs replay generated scenario/observation sets with a known feature ->
// event coupling.
struct GenOptions {
    int days = 32;
    std::uint64_t seed = 42;
    std::string out_dir = "season";
    std::array<double, 4> base_rates{0.18, 0.25, 0.30, 0.22};  // Z1..Z4 event rates
    double coupling = 1.2;   // event-probability swing per unit storm potential
    double severe_share = 0.35;
    int library_days = 120;  // analog library history length
    std::string start_date = "1989-06-01";
};

// Writes scenarios/, obs.csv, models/ (one config per system), config.json
// (the seven systems) and config_full.json (plus climatology and an
// uninformed control model).
void generate_season(const GenOptions& options);

}  // namespace shootout
