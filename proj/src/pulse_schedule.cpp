#include "ppcqed/pulse_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppcqed/errors.hpp"

namespace ppcqed {

PulseSchedule::PulseSchedule(std::vector<PulseSegment> segments) {
    for (const auto& s : segments) append(s);
}

PulseSchedule& PulseSchedule::append(const PulseSegment& segment) {
    if (!(segment.duration > 0.0) || !std::isfinite(segment.duration)) {
        throw DomainError("pulse segment duration must be positive and finite");
    }
    if (edges_.empty()) edges_.push_back(0.0);
    segments_.push_back(segment);
    edges_.push_back(edges_.back() + segment.duration);
    return *this;
}

double PulseSchedule::edge(std::size_t i) const {
    if (i >= edges_.size()) throw ScheduleError("segment edge index out of range");
    return edges_[i];
}

std::size_t PulseSchedule::index_at(double t) const {
    if (segments_.empty()) throw ScheduleError("empty pulse schedule");
    if (!(t >= 0.0) || t > horizon()) {
        throw ScheduleError("time " + std::to_string(t) + " s outside schedule horizon");
    }
    // First edge strictly greater than t closes the containing segment.
    auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    if (it == edges_.end()) return segments_.size() - 1;
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

}  // namespace ppcqed
