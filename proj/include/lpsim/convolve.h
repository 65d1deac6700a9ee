#ifndef LPSIM_CONVOLVE_H_
#define LPSIM_CONVOLVE_H_

#include "lpsim/image.h"

namespace lpsim {

// Linear 2D convolution of every channel with `kernel`, evaluated in the
// frequency domain. The image is zero-padded by kernel.radius() on each side
// and the result is cropped back to the input dimensions, so
//
//   out(x, y) = sum_{i,j} K(i, j) * in(x - (i - r), y - (j - r)),  r = s / 2
//
// with out-of-frame samples read as zero. A kernel whose mass sits above its
// center therefore spreads each source upward.
//
// Throws SizingError when the kernel does not fit the padded frame or the
// transform would be unreasonably large.
Image fft_convolve(const Image& image, const Kernel& kernel);

// Smallest n >= min_size whose prime factors are all in {2, 3, 5, 7}.
int next_fft_size(int min_size);

}  // namespace lpsim

#endif  // LPSIM_CONVOLVE_H_
