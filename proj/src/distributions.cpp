#include "nhpp/distributions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace nhpp {

namespace {

// Matrix with a base-10 exponent carried separately so H^n stays finite for
// n up to ks_exact_max_n.
struct Scaled {
    Eigen::MatrixXd mat;
    long exp10 = 0;
};

void normalize(Scaled& s) {
    const double mx = s.mat.cwiseAbs().maxCoeff();
    if (mx > 1e140) {
        s.mat *= 1e-140;
        s.exp10 += 140;
    }
}

Scaled matrix_power(const Eigen::MatrixXd& h, int n) {
    if (n == 1) return {h, 0};
    Scaled half = matrix_power(h, n / 2);
    Scaled out{half.mat * half.mat, 2 * half.exp10};
    normalize(out);
    if (n % 2 != 0) {
        out.mat = out.mat * h;
        normalize(out);
    }
    return out;
}

// Exact P(D_n < d) by the Durbin recursion in the matrix form of Marsaglia,
// Tsang and Wang: build the (2k-1)x(2k-1) transition matrix, raise it to the
// n-th power and scale by n!/n^n.
double ks_cdf_exact(int n, double d) {
    if (d <= 0.5 / n) return 0.0;  // D_n >= 1/(2n) always
    if (d >= 1.0) return 1.0;
    const double nd = n * d;
    const int k = int(nd) + 1;
    const int m = 2 * k - 1;
    const double h = k - nd;

    Eigen::MatrixXd H(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) H(i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        H(i, 0) -= std::pow(h, i + 1);
        H(m - 1, i) -= std::pow(h, m - i);
    }
    H(m - 1, 0) += (2 * h - 1 > 0) ? std::pow(2 * h - 1, m) : 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) H(i, j) /= g;

    const Scaled p = matrix_power(H, n);
    double s = p.mat(k - 1, k - 1);
    long e = p.exp10;
    for (int i = 1; i <= n; ++i) {
        s = s * i / n;
        if (s < 1e-140 && s > 0) {
            s *= 1e140;
            e -= 140;
        }
    }
    const double value = (e == 0) ? s : s * std::pow(10.0, double(e));
    return std::clamp(value, 0.0, 1.0);
}

double stephens_scale(int n) {
    const double rn = std::sqrt(double(n));
    return rn + 0.12 + 0.11 / rn;
}

constexpr double pi = 3.14159265358979323846;

// Regularized incomplete gamma, series and continued-fraction halves.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.18) {
        // Jacobi-transformed series, accurate where the alternating one is slow.
        const double v = pi * pi / (8.0 * x * x);
        double sum = 0.0;
        for (int j = 1; j <= 7; j += 2) sum += std::exp(-double(j) * j * v);
        return std::sqrt(2.0 * pi) / x * sum;
    }
    const double t = std::exp(-2.0 * x * x);
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 30; ++j) {
        const double term = std::pow(t, double(j) * j);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(1.0 - 2.0 * sum, 0.0, 1.0);
}

double ks_cdf(int n, double d) {
    if (n < 1) throw std::invalid_argument("ks_cdf: sample size must be >= 1");
    if (n <= ks_exact_max_n) return ks_cdf_exact(n, d);
    return kolmogorov_cdf(d * stephens_scale(n));
}

double ks_p_value(int n, double d) {
    if (n < 1) throw std::invalid_argument("ks_p_value: sample size must be >= 1");
    if (n > ks_exact_max_n) {
        const double x = d * stephens_scale(n);
        if (x >= 1.18) {
            // direct tail series keeps precision where 1 - cdf would cancel
            const double t = std::exp(-2.0 * x * x);
            double sum = 0.0;
            double sign = 1.0;
            for (int j = 1; j <= 30; ++j) {
                const double term = std::pow(t, double(j) * j);
                sum += sign * term;
                if (term < sum * 1e-18) break;
                sign = -sign;
            }
            return std::clamp(2.0 * sum, 0.0, 1.0);
        }
        return std::clamp(1.0 - kolmogorov_cdf(x), 0.0, 1.0);
    }
    return std::clamp(1.0 - ks_cdf(n, d), 0.0, 1.0);
}

double ks_critical(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("ks_critical: sample size must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ks_critical: alpha must lie in (0, 1)");

    static std::map<std::pair<int, long long>, double> cache;
    static std::mutex cache_mutex;
    const std::pair<int, long long> key{n, std::llround(alpha * 1e12)};
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const double target = 1.0 - alpha;
    // Bracket around the asymptotic guess; keeps the exact-cdf evaluations on
    // small matrices.
    double xa_lo = 1e-8, xa_hi = 10.0;
    while (xa_hi - xa_lo > 1e-9) {
        const double mid = 0.5 * (xa_lo + xa_hi);
        (kolmogorov_cdf(mid) < target ? xa_lo : xa_hi) = mid;
    }
    const double guess = xa_hi / stephens_scale(n);

    double lo = std::max(0.5 / n, guess / 3.0);
    double hi = std::min(1.0, guess * 3.0);
    while (ks_cdf(n, lo) >= target && lo > 0.5 / n) lo = std::max(0.5 / n, lo / 2.0);
    while (ks_cdf(n, hi) < target && hi < 1.0) hi = std::min(1.0, hi * 1.5);
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (ks_cdf(n, mid) < target ? lo : hi) = mid;
    }

    std::lock_guard lock(cache_mutex);
    cache.emplace(key, hi);
    return hi;
}

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_quantile(int dof, double alpha) {
    if (dof < 1) throw std::invalid_argument("chi2_quantile: dof must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("chi2_quantile: alpha must lie in (0, 1)");

    static std::map<std::pair<int, long long>, double> cache;
    static std::mutex cache_mutex;
    const std::pair<int, long long> key{dof, std::llround(alpha * 1e12)};
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const double target = 1.0 - alpha;
    const double half = dof / 2.0;
    double lo = 0.0;
    double hi = dof + 10.0 * std::sqrt(double(dof)) + 10.0;
    while (gamma_p(half, hi / 2.0) < target) hi *= 2.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (gamma_p(half, mid / 2.0) < target ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);

    std::lock_guard lock(cache_mutex);
    cache.emplace(key, q);
    return q;
}

double chi2_p_value(int dof, double x) {
    if (dof < 1) throw std::invalid_argument("chi2_p_value: dof must be >= 1");
    if (x < 0.0) throw std::invalid_argument("chi2_p_value: x must be >= 0");
    return gamma_q(dof / 2.0, x / 2.0);
}

}  // namespace nhpp
