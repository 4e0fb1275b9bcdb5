#ifndef FASTMAPSVM_DETAIL_FFT_HPP
#define FASTMAPSVM_DETAIL_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace fastmapsvm::detail {

// In-place iterative radix-2 transform; x.size() must be a power of two.
// inverse = true applies the conjugate transform and the 1/N scaling.
void fft(std::vector<std::complex<double>>& x, bool inverse);

// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

}  // namespace fastmapsvm::detail

#endif
