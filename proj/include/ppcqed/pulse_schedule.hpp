#pragma once

#include <cstddef>
#include <vector>

namespace ppcqed {

// One square segment of sideband coupling and resonant qubit drive.
struct PulseSegment {
    double duration = 0.0;        // s
    double coupling = 0.0;        // g, rad/s
    double drive_amplitude = 0.0; // epsilon, rad/s
    bool drive_on = false;
};

// Piecewise-constant control sequence starting at t = 0. Lookups are
// right-continuous: at an interior edge the later segment applies. The final
// edge belongs to the last segment.
class PulseSchedule {
public:
    PulseSchedule() = default;
    explicit PulseSchedule(std::vector<PulseSegment> segments);

    PulseSchedule& append(const PulseSegment& segment);

    const std::vector<PulseSegment>& segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }
    double horizon() const { return edges_.empty() ? 0.0 : edges_.back(); }

    // Start time of segment i; edge(size()) is the horizon.
    double edge(std::size_t i) const;

    std::size_t index_at(double t) const;
    const PulseSegment& segment_at(double t) const { return segments_[index_at(t)]; }

    // Drive amplitude seen by the qubit (zero when the drive is off).
    static double effective_drive(const PulseSegment& s) { return s.drive_on ? s.drive_amplitude : 0.0; }

private:
    std::vector<PulseSegment> segments_;
    std::vector<double> edges_;  // edges_[i] = start of segment i, plus the horizon
};

}  // namespace ppcqed
