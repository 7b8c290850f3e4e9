#include "resest/attack.hpp"

#include "resest/errors.hpp"
#include "resest/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace resest {
namespace {

void check_targets(const IndexSet& targets, Eigen::Index size, const char* what) {
    IndexSet sorted = targets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError(std::string(what) + " targets contain duplicates");
    }
    for (int t : targets) {
        if (t < 0 || t >= size) {
            throw DomainError(std::string(what) + " target " + std::to_string(t) + " is out of range");
        }
    }
}

}  // namespace

std::string_view to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::SensorBias: return "sensor-bias";
        case AttackKind::StateTargeted: return "state-targeted";
    }
    return "unknown";
}

Vector attack_signs(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    Vector s(static_cast<Eigen::Index>(count));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s(i) = rng.sign();
    }
    return s;
}

Vector sensor_bias_attack(const Vector& y_true, const IndexSet& targets, double factor, std::uint64_t seed) {
    if (targets.empty()) {
        throw DomainError("sensor bias attack needs at least one target");
    }
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
        throw DomainError("bias factor must be finite and nonnegative");
    }
    check_targets(targets, y_true.size(), "sensor");
    const Vector signs = attack_signs(targets.size(), seed);
    Vector y = y_true;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const int j = targets[i];
        y(j) += signs(static_cast<Eigen::Index>(i)) * factor * std::abs(y_true(j));
    }
    return y;
}

Vector state_targeted_attack(const Matrix& h, const IndexSet& state_targets, double bias_fraction,
                             const Vector& x_true) {
    if (x_true.size() != h.cols()) {
        throw ShapeError("x_true length does not match the columns of H");
    }
    check_targets(state_targets, h.cols(), "state");
    Vector c = Vector::Zero(h.cols());
    for (int j : state_targets) {
        c(j) = bias_fraction * x_true(j);
    }
    return h * c;
}

IndexSet random_support(int m, int count, std::uint64_t seed) {
    if (m < 0 || count < 0 || count > m) {
        throw DomainError("cannot draw " + std::to_string(count) + " of " + std::to_string(m) + " indices");
    }
    IndexSet pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(m - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    IndexSet out(pool.begin(), pool.begin() + count);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace resest
