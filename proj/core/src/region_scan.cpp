// region_scan.cpp: parallel scans of U' and N membership over a Bloch-ball slice.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "natcorr/format.hpp"
#include "natcorr/natural_correlation.hpp"

namespace natcorr {

namespace {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is written
// by exactly one worker, so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            (void)w;
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::size_t RegionScanResult::count_u_prime() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.in_u_prime; }));
}

std::size_t RegionScanResult::count_n() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) { return p.in_n; }));
}

RegionScanResult region_scan(const RedfieldGenerator& generator, const GridSpec& grid, const ScanSettings& settings) {
    if (grid.n < 2) throw std::invalid_argument("region_scan: grid needs at least 2 points per axis");
    if (!(std::abs(grid.z) <= 1.0)) throw std::invalid_argument("region_scan: slice z must lie in [-1, 1]");
    const VariationalKernel vk(generator.model, generator.kernel, settings.variational);
    const PositivityProbe probe(generator, settings.positivity);

    RegionScanResult out;
    out.grid = grid;
    out.epsilon = generator.model.epsilon;
    out.lambda = generator.lambda;
    out.points.resize(grid.n * grid.n);
    const double step = 2.0 / static_cast<double>(grid.n - 1);

    parallel_for(out.points.size(), settings.jobs, [&](std::size_t idx) {
        const std::size_t iy = idx / grid.n;
        const std::size_t ix = idx % grid.n;
        RegionPoint& p = out.points[idx];
        p.x = -1.0 + step * static_cast<double>(ix);
        p.y = -1.0 + step * static_cast<double>(iy);
        p.z = grid.z;
        const BlochVector b{p.x, p.y, p.z};
        p.physical = b.physical(1e-12);
        if (!p.physical) return;
        const DensityMatrix rho = bloch_to_density(b);
        const VariationalResult v = vk.membership(rho.matrix(), generator.lambda);
        p.p0 = v.p0;
        p.bound = v.bound;
        p.in_u_prime = v.in_u_prime;
        p.t_star = v.t_star;
        const NMembership n = probe.evaluate(rho.matrix());
        p.in_n = n.in_n;
        p.min_eig = n.min_eigenvalue_attained;
        p.witness_t = n.witness_time;
    });
    return out;
}

std::vector<std::size_t> inclusion_violations(const RegionScanResult& r) {
    std::vector<std::size_t> bad;
    const auto n = static_cast<long>(r.grid.n);
    for (long iy = 0; iy < n; ++iy) {
        for (long ix = 0; ix < n; ++ix) {
            if (!r.at(iy, ix).in_n) continue;
            bool covered = false;
            for (long dy = -1; dy <= 1 && !covered; ++dy) {
                for (long dx = -1; dx <= 1 && !covered; ++dx) {
                    const long y = iy + dy;
                    const long x = ix + dx;
                    if (y < 0 || x < 0 || y >= n || x >= n) continue;
                    covered = r.at(y, x).in_u_prime;
                }
            }
            if (!covered) bad.push_back(static_cast<std::size_t>(iy * n + ix));
        }
    }
    return bad;
}

std::string region_csv(const RegionScanResult& r) {
    std::ostringstream os;
    os << "x,y,z,p0,bound,in_U_prime,in_N,min_eig,witness_t\n";
    for (const auto& p : r.points) {
        if (!p.physical) continue;
        os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
           << format_double(p.p0) << ',' << format_double(p.bound) << ',' << (p.in_u_prime ? 1 : 0) << ','
           << (p.in_n ? 1 : 0) << ',' << format_double(p.min_eig) << ',';
        if (p.witness_t) os << format_double(*p.witness_t);
        os << '\n';
    }
    return os.str();
}

RadialDepth radial_depth(const VariationalKernel& vk, double lambda, double z, std::size_t n_rays, double tol,
                         unsigned jobs) {
    if (n_rays == 0) throw std::invalid_argument("radial_depth: need at least one ray");
    if (!(std::abs(z) < 1.0)) throw std::invalid_argument("radial_depth: slice z must lie in (-1, 1)");
    const double r_max = std::sqrt(1.0 - z * z);
    RadialDepth out;
    out.depths.assign(n_rays, 0.0);
    parallel_for(n_rays, jobs, [&](std::size_t k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_rays);
        auto inside = [&](double r) {
            const BlochVector b{r * std::cos(angle), r * std::sin(angle), z};
            return vk.membership(bloch_to_density(b).matrix(), lambda).in_u_prime;
        };
        if (!inside(r_max)) {
            out.depths[k] = 0.0;
            return;
        }
        if (inside(0.0)) {
            out.depths[k] = r_max;
            return;
        }
        double lo = 0.0;
        double hi = r_max;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (inside(mid) ? hi : lo) = mid;
        }
        out.depths[k] = r_max - hi;
    });
    for (std::size_t k = 0; k < n_rays; ++k) {
        if (out.depths[k] > out.max_depth) {
            out.max_depth = out.depths[k];
            out.angle_of_max = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_rays);
        }
    }
    return out;
}

}  // namespace natcorr
