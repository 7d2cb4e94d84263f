#include "specbox/state_vector.hpp"

#include <cstring>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace specbox::kernels {

#if defined(__AVX512F__)

bool span_kernel_available() { return true; }

// Row panels of 8 complex values (2 zmm) by column blocks of 8. Per column
// scalar b the complex product splits into a*Re(b) and swapped(a)*Im(b) with
// the real lane negated, so each (panel, column) pair costs four FMAs.
// Panels whose inputs are all exactly zero contribute nothing and are
// skipped before any arithmetic.
void apply_span_block(cplx* data, std::size_t rows, std::size_t lda,
                      const double* b_re, const double* b_im, std::size_t dim) {
    const __m512d signflip = _mm512_set_pd(0.0, -0.0, 0.0, -0.0, 0.0, -0.0, 0.0, -0.0);
    // tile: one full output row panel (8 rows x dim columns)
    alignas(64) cplx tile[8 * 256];
    for (std::size_t i = 0; i < rows; i += 8) {
        bool nonzero = false;
        for (std::size_t m = 0; m < dim && !nonzero; ++m) {
            const double* p = reinterpret_cast<const double*>(data + m * lda + i);
            __m512d x = _mm512_or_pd(_mm512_loadu_pd(p), _mm512_loadu_pd(p + 8));
            nonzero = _mm512_cmp_pd_mask(x, _mm512_setzero_pd(), _CMP_NEQ_UQ) != 0;
        }
        if (!nonzero) continue;

        for (std::size_t jb = 0; jb < dim; jb += 8) {
            __m512d acc[16];
            for (auto& a : acc) a = _mm512_setzero_pd();
            for (std::size_t m = 0; m < dim; ++m) {
                const double* p = reinterpret_cast<const double*>(data + m * lda + i);
                __m512d a0 = _mm512_loadu_pd(p);
                __m512d a1 = _mm512_loadu_pd(p + 8);
                __m512d s0 = _mm512_xor_pd(_mm512_permute_pd(a0, 0x55), signflip);
                __m512d s1 = _mm512_xor_pd(_mm512_permute_pd(a1, 0x55), signflip);
                const double* br = b_re + m * dim + jb;
                const double* bi = b_im + m * dim + jb;
                for (int j = 0; j < 8; ++j) {
                    __m512d vbr = _mm512_set1_pd(br[j]);
                    __m512d vbi = _mm512_set1_pd(bi[j]);
                    acc[2 * j] = _mm512_fmadd_pd(a0, vbr, acc[2 * j]);
                    acc[2 * j] = _mm512_fmadd_pd(s0, vbi, acc[2 * j]);
                    acc[2 * j + 1] = _mm512_fmadd_pd(a1, vbr, acc[2 * j + 1]);
                    acc[2 * j + 1] = _mm512_fmadd_pd(s1, vbi, acc[2 * j + 1]);
                }
            }
            for (int j = 0; j < 8; ++j) {
                double* t = reinterpret_cast<double*>(tile + (jb + j) * 8);
                _mm512_storeu_pd(t, acc[2 * j]);
                _mm512_storeu_pd(t + 8, acc[2 * j + 1]);
            }
        }
        for (std::size_t j = 0; j < dim; ++j)
            std::memcpy(data + j * lda + i, tile + j * 8, 8 * sizeof(cplx));
    }
}

#else // portable fallback

bool span_kernel_available() { return false; }

void apply_span_block(cplx* data, std::size_t rows, std::size_t lda,
                      const double* b_re, const double* b_im, std::size_t dim) {
    std::vector<cplx> tile(8 * dim);
    for (std::size_t i = 0; i < rows; i += 8) {
        bool nonzero = false;
        for (std::size_t m = 0; m < dim && !nonzero; ++m)
            for (int r = 0; r < 8; ++r)
                if (data[m * lda + i + r] != cplx{0.0, 0.0}) {
                    nonzero = true;
                    break;
                }
        if (!nonzero) continue;

        std::fill(tile.begin(), tile.end(), cplx{0.0, 0.0});
        for (std::size_t m = 0; m < dim; ++m) {
            const cplx* a = data + m * lda + i;
            for (std::size_t j = 0; j < dim; ++j) {
                cplx b{b_re[m * dim + j], b_im[m * dim + j]};
                for (int r = 0; r < 8; ++r) tile[j * 8 + r] += a[r] * b;
            }
        }
        for (std::size_t j = 0; j < dim; ++j)
            std::memcpy(data + j * lda + i, tile.data() + j * 8, 8 * sizeof(cplx));
    }
}

#endif

} // namespace specbox::kernels
