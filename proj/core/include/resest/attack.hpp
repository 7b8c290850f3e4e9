#pragma once

#include "resest/types.hpp"

#include <cstdint>
#include <string_view>

namespace resest {

enum class AttackKind { SensorBias, StateTargeted };

std::string_view to_string(AttackKind kind);

struct AttackSpec {
    AttackKind kind = AttackKind::SensorBias;
    IndexSet targets;        // sensors (SensorBias) or states (StateTargeted), 0-based
    double magnitude = 5.0;  // bias factor or state bias fraction
    std::uint64_t seed = 0;
};

/// One +-1 sign per target, drawn in target order from a generator seeded with `seed`.
Vector attack_signs(std::size_t count, std::uint64_t seed);

/// y_j + s_j * factor * |y_j| on the targets, with signs from attack_signs.
Vector sensor_bias_attack(const Vector& y_true, const IndexSet& targets, double factor, std::uint64_t seed);

/// H c with c_j = bias_fraction * x_true_j on the targeted states. The result
/// lies in range(H), so residual-based detectors cannot see it.
Vector state_targeted_attack(const Matrix& h, const IndexSet& state_targets, double bias_fraction,
                             const Vector& x_true);

/// Uniformly random sorted subset of {0..m-1} with `count` elements.
IndexSet random_support(int m, int count, std::uint64_t seed);

}  // namespace resest
