#pragma once

namespace stratrt::detail {

/// Integrals of E_n over one grid segment [near, near + width] in optical units:
///   total        = int E_n(s) ds
///   far_weighted = int (s - near) / width * E_n(s) ds
/// The near-node hat function receives total - far_weighted, the far node
/// far_weighted.
struct SegmentMoments {
  double total = 0.0;
  double far_weighted = 0.0;
};

/// Segments at least this wide use the closed-form antiderivatives directly.
inline constexpr double kClosedFormWidth = 1e-3;

inline bool closed_form_applies(double width) { return width >= kClosedFormWidth; }

/// Closed form from E_{n+1} and E_{n+2} at both ends:
///   int E_n = E_{n+1}(a) - E_{n+1}(b)
///   int (s - a) E_n = E_{n+2}(a) - E_{n+2}(b) - (b - a) E_{n+1}(b)
SegmentMoments segment_moments_closed(double width, double e_next_near, double e_next_far,
                                      double e_next2_near, double e_next2_far);

/// Full evaluation. Below kClosedFormWidth the closed form loses digits to
/// cancellation (roughly eps / width^2 in far_weighted), so narrow segments use
/// Gauss-Legendre instead, after peeling the s^{n-1} log s part off
/// analytically when the segment sits within two widths of s = 0.
SegmentMoments segment_moments(int n, double near, double width);

}  // namespace stratrt::detail
