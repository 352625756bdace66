#include "conslab/sampling.hpp"

#include <cmath>
#include <random>

#include "conslab/error.hpp"

namespace conslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform in [-1, 1) from the top 53 bits; avoids the implementation-defined
// std distributions so tables match across standard libraries.
double unit(std::mt19937_64& r) { return std::ldexp(static_cast<double>(r() >> 11), -52) - 1.0; }

}  // namespace

Family parse_family(const std::string& name) {
  if (name == "random") return Family::random;
  if (name == "bubble") return Family::bubble;
  if (name == "dipole") return Family::dipole;
  throw Error("unknown family '" + name + "' (expected random, bubble or dipole)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::random: return "random";
    case Family::bubble: return "bubble";
    case Family::dipole: return "dipole";
  }
  return "?";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScalarField band_limited(GridPtr g, std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  struct Mode {
    int k, l;
    double c, s;
  };
  std::vector<Mode> ms;
  for (int k = 0; k <= modes; ++k)
    for (int l = -modes; l <= modes; ++l) {
      if (k == 0 && l <= 0) continue;  // constant mode dropped, (k,l) ~ (-k,-l)
      const double d = 1.0 / (1.0 + k * k + l * l);
      const double c = unit(rng) * d, s = unit(rng) * d;
      ms.push_back({k, l, c, s});
    }
  ScalarField f(g);
  for (int p = 0; p < g->N; ++p) {
    double v = 0.0;
    for (const Mode& m : ms) {
      const double t = 0.5 * kPi * (m.k * g->x[p] + m.l * g->y[p]);
      v += m.c * std::cos(t) + m.s * std::sin(t);
    }
    f.v[p] = v;
  }
  return f;
}

ScalarField quantized_band_limited(GridPtr g, std::uint64_t seed, int modes) {
  ScalarField f = band_limited(g, seed, modes);
  const double s = std::ldexp(1.0, 24);
  for (int p = 0; p < g->N; ++p) f.v[p] = std::round(f.v[p] * s) / s;
  return f;
}

SamplePair sample_pair(GridPtr g, Family f, std::uint64_t seed, int index) {
  const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(index));
  switch (f) {
    case Family::random:
      return {band_limited(g, mix_seed(s, 1)), band_limited(g, mix_seed(s, 2))};
    case Family::bubble: {
      const double lam = 0.5 * (index + 1);
      auto comp = [lam](int c) {
        return [lam, c](double x, double y) {
          const double w = lam * (c == 0 ? x : y);
          return 2.0 * w / (1.0 + lam * lam * (x * x + y * y));
        };
      };
      return {ScalarField::from(g, comp(0)), ScalarField::from(g, comp(1))};
    }
    case Family::dipole: {
      std::mt19937_64 rng(s);
      double c[8];
      for (double& v : c) v = 0.45 * unit(rng);
      const double sig2 = 0.09;
      auto dip = [sig2](double x0, double y0, double x1, double y1) {
        return [=](double x, double y) {
          const double a = (x - x0) * (x - x0) + (y - y0) * (y - y0);
          const double b = (x - x1) * (x - x1) + (y - y1) * (y - y1);
          return std::exp(-a / sig2) - std::exp(-b / sig2);
        };
      };
      return {ScalarField::from(g, dip(c[0], c[1], c[2], c[3])), ScalarField::from(g, dip(c[4], c[5], c[6], c[7]))};
    }
  }
  throw Error("unknown family");
}

}  // namespace conslab
