#pragma once

#include <cstdint>
#include <vector>

#include "radio/base_station.hpp"
#include "traffic/vehicle.hpp"

namespace vqmorl {

/// Complete simulation state. A plain value: every stepping function takes a
/// WorldState and returns the next one. Randomness is drawn from counter-based
/// substreams keyed on `seed` and the clock, so no generator lives in here.
struct WorldState {
  traffic::RoadConfig road;
  traffic::IdmParams idm;
  radio::RadioConfig radio;

  std::vector<traffic::VehicleState> vehicles;
  std::vector<radio::BaseStation> stations;
  std::vector<radio::AssocState> assoc;  // parallel to vehicles
  std::vector<int> loads;                // parallel to stations

  std::uint64_t seed = 0;
  std::int64_t tick = 0;  // kinematic sub-steps taken
  int t = 0;              // policy steps taken
  bool lane_change_rejected = false;
  bool done = false;

  std::size_t ego_index() const;
  bool operator==(const WorldState&) const = default;
};

}  // namespace vqmorl
