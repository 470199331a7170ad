#include "pdfs/error.hpp"
#include "pdfs/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace pdfs {
namespace {

void require_radius(double eta, const char* who) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw InvalidArgument(std::string(who) + ": radius must be finite and positive, got " +
                              std::to_string(eta));
    }
}

double abs_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

void soft_threshold(std::span<double> v, double theta) {
    for (double& x : v) {
        const double a = std::abs(x) - theta;
        x = a > 0.0 ? std::copysign(a, x) : 0.0;
    }
}

} // namespace

// L. Condat, "Fast projection onto the simplex and the l1 ball", Math. Prog. 2016.
double l1_threshold_condat(std::span<const double> v, double eta) {
    const std::size_t n = v.size();
    std::vector<double> active;
    std::vector<double> waiting;
    active.reserve(n);

    active.push_back(std::abs(v[0]));
    double rho = active.front() - eta;
    for (std::size_t i = 1; i < n; ++i) {
        const double y = std::abs(v[i]);
        if (y <= rho) continue;
        rho += (y - rho) / static_cast<double>(active.size() + 1);
        if (rho > y - eta) {
            active.push_back(y);
        } else {
            waiting.insert(waiting.end(), active.begin(), active.end());
            active.assign(1, y);
            rho = y - eta;
        }
    }
    for (double y : waiting) {
        if (y > rho) {
            active.push_back(y);
            rho += (y - rho) / static_cast<double>(active.size());
        }
    }

    std::size_t size = active.size();
    std::size_t before = 0;
    do {
        before = size;
        std::size_t kept = 0;
        for (std::size_t r = 0; r < before; ++r) {
            const double y = active[r];
            if (y <= rho && size > 1) {
                --size;
                rho += (rho - y) / static_cast<double>(size);
            } else {
                active[kept++] = y;
            }
        }
        active.resize(kept);
        size = kept;
    } while (size != before);
    return std::max(rho, 0.0);
}

double l1_threshold_sort(std::span<const double> v, double eta) {
    std::vector<double> u(v.size());
    std::transform(v.begin(), v.end(), u.begin(), [](double x) { return std::abs(x); });
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double candidate = (cumsum - eta) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) theta = candidate;
    }
    return std::max(theta, 0.0);
}

void proj_l1_inplace(std::span<double> v, double eta) {
    require_radius(eta, "proj_l1");
    if (v.empty() || abs_sum(v) <= eta) return;
    soft_threshold(v, l1_threshold_condat(v, eta));
}

Vector proj_l1(const Vector& v, double eta) {
    Vector out = v;
    proj_l1_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), eta);
    return out;
}

Vector proj_l1_sorted(const Vector& v, double eta) {
    require_radius(eta, "proj_l1_sorted");
    Vector out = v;
    std::span<double> s(out.data(), static_cast<std::size_t>(out.size()));
    if (s.empty() || abs_sum(s) <= eta) return out;
    soft_threshold(s, l1_threshold_sort(s, eta));
    return out;
}

Matrix proj_l1_matrix(const Matrix& v, double eta) {
    Matrix out = v;
    proj_l1_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), eta);
    return out;
}

} // namespace pdfs
