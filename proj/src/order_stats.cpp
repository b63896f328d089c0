#include <cmath>

#include "stqp/distributions.hpp"
#include "stqp/errors.hpp"

namespace stqp {

OrderStatSample order_stats_from_spacings(std::int64_t n_pop, std::span<const double> leading,
                                          double remainder) {
    const auto k = static_cast<std::int64_t>(leading.size());
    if (k < 1 || k > n_pop) throw DomainError("order statistics: need 1 <= k <= n_pop");
    if (!(remainder > 0.0)) throw DomainError("order statistics: remainder spacing sum must be positive");

    OrderStatSample out;
    out.n_pop = n_pop;
    out.k = k;
    out.u.resize(leading.size());
    out.spacings.assign(leading.begin(), leading.end());
    out.spacings.push_back(remainder);

    double partial = 0.0;
    for (std::size_t j = 0; j < leading.size(); ++j) {
        if (!(leading[j] > 0.0)) throw DomainError("order statistics: spacings must be positive");
        partial += leading[j];
        out.u[j] = partial;
    }
    const double total = partial + remainder;
    for (double& v : out.u) v /= total;
    return out;
}

OrderStatSample sample_order_stats(std::int64_t n_pop, std::int64_t k, Stream& stream) {
    if (k < 1 || k > n_pop) {
        throw DomainError("sample_order_stats: need 1 <= k <= n_pop (k=" + std::to_string(k) +
                          ", n_pop=" + std::to_string(n_pop) + ")");
    }
    std::vector<double> leading(static_cast<std::size_t>(k));
    for (double& w : leading) w = stream.exponential();
    // Sum of the remaining n_pop + 1 - k unit exponentials.
    const double remainder = stream.gamma(static_cast<double>(n_pop + 1 - k));
    return order_stats_from_spacings(n_pop, leading, remainder);
}

double s_statistic(std::span<const double> u) {
    if (u.empty()) throw DomainError("s_statistic: empty sample");
    double sum = 0.0;
    for (double v : u) {
        if (!(v > 0.0)) throw DomainError("s_statistic: all u_j must be positive");
        sum -= std::log(v);
    }
    return sum / static_cast<double>(u.size());
}

}  // namespace stqp
