#include <ebicsel/random.hpp>
#include <cmath>

namespace ebicsel {

double RandomStream::uniform(double lo, double hi)
{
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return lo + (hi - lo) * u;
}

double RandomStream::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream derive_stream(std::uint64_t master_seed,
                           std::uint64_t setting_id,
                           std::uint64_t replicate_index)
{
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ mix64(setting_id + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ mix64(replicate_index + 0x85157af5ULL));
    return RandomStream(h);
}

} // namespace ebicsel
