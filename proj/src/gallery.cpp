#include "defdist/gallery.hpp"

#include <cmath>
#include <string>

#include "defdist/errors.hpp"

namespace defdist::gallery {

ComplexMatrix kahan(std::size_t n, double target) {
    if (n < 2) throw BadParameterError("kahan: n >= 2 required");
    if (!(target > 0.0 && target < 1.0))
        throw BadParameterError("kahan: target must lie in (0, 1), got " + std::to_string(target));
    const double s = std::pow(target, 1.0 / static_cast<double>(n - 1));
    const double c = std::sqrt(1.0 - s * s);
    ComplexMatrix A(n, n);
    double row_scale = 1.0;  // s^i
    for (std::size_t i = 0; i < n; ++i) {
        A(i, i) = row_scale;
        const double off = -row_scale * c;
        for (std::size_t j = i + 1; j < n; ++j) A(i, j) = off;
        row_scale *= s;
    }
    return A;
}

ComplexMatrix grcar(std::size_t n) {
    if (n < 2) throw BadParameterError("grcar: n >= 2 required");
    ComplexMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) A(i, i - 1) = -1.0;
        for (std::size_t j = i; j < std::min(n, i + 4); ++j) A(i, j) = 1.0;
    }
    return A;
}

ComplexMatrix embedded_kahan(std::size_t n, std::size_t block) {
    if (block > n)
        throw BadParameterError("embedded_kahan: block " + std::to_string(block) +
                                " exceeds n = " + std::to_string(n));
    ComplexMatrix B = kahan(block, 0.1);  // validates block >= 2
    ComplexMatrix A = identity(n);
    for (std::size_t i = 0; i < block; ++i)
        for (std::size_t j = 0; j < block; ++j) A(i, j) = B(i, j);
    return A;
}

ComplexMatrix make(const GallerySpec& spec) {
    switch (spec.kind) {
        case GalleryKind::kahan:
            return kahan(spec.n, spec.kahan_target);
        case GalleryKind::grcar:
            return grcar(spec.n);
        case GalleryKind::embedded_kahan:
            return embedded_kahan(spec.n, spec.block);
    }
    throw BadParameterError("gallery: unknown kind");
}

}  // namespace defdist::gallery
