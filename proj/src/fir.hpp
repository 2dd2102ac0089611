// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_FIR_HPP
#define HLSEP_FIR_HPP

#include <cstddef>
#include <vector>

namespace hlsep {

// Kaiser-windowed sinc designs. All filters are linear-phase FIR with an
// odd tap count; apply_fir compensates the group delay so outputs stay
// time-aligned with their inputs.

// Zeroth-order modified Bessel function of the first kind.
double bessel_i0(double x);

// Lowpass kernel with unit DC gain. cutoff_hz is the -6 dB edge,
// stopband_atten_db the target attenuation reached after transition_hz.
std::vector<double> design_lowpass(double cutoff_hz, double transition_hz,
                                   double stopband_atten_db, double sample_rate);

// Bandpass built as the difference of two lowpass kernels.
std::vector<double> design_bandpass(double low_hz, double high_hz,
                                    double transition_hz,
                                    double stopband_atten_db, double sample_rate);

// Zero-phase "same" convolution: output length equals input length, taps
// must be odd, out-of-range input treated as zero.
std::vector<double> apply_fir(const std::vector<double>& x,
                              const std::vector<double>& taps);

}  // namespace hlsep

#endif  // HLSEP_FIR_HPP
