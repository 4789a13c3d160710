#include "rgc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rgc/errors.hpp"
#include "rgc/rng.hpp"

namespace rgc {

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "symmetric") return NoiseKind::Symmetric;
  if (name == "asymmetric") return NoiseKind::Asymmetric;
  if (name == "instance_dependent") return NoiseKind::InstanceDependent;
  throw InvalidConfigError("noise.kind: unknown kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Symmetric: return "symmetric";
    case NoiseKind::Asymmetric: return "asymmetric";
    case NoiseKind::InstanceDependent: return "instance_dependent";
  }
  return "symmetric";
}

std::vector<Vec> mixture_centers(int num_classes, int dim, double separation) {
  if (num_classes < 2 || dim < 2) {
    throw InvalidConfigError("mixture: need num_classes >= 2 and dim >= 2");
  }
  if (dim < num_classes) {
    throw InvalidConfigError("mixture: need dim >= num_classes for equidistant centers");
  }
  if (separation <= 0.0) {
    throw InvalidConfigError("mixture: separation must be > 0");
  }
  const double scale = separation / std::sqrt(2.0);
  std::vector<Vec> centers(num_classes, Vec(dim, 0.0));
  for (int k = 0; k < num_classes; ++k) centers[k][k] = scale;
  return centers;
}

std::vector<Sample> make_gaussian_mixture(int num_classes, int n_per_class,
                                          int dim, double separation,
                                          std::uint64_t seed, int id_offset) {
  if (n_per_class < 1) {
    throw InvalidConfigError("mixture: n_per_class must be >= 1");
  }
  const std::vector<Vec> centers = mixture_centers(num_classes, dim, separation);
  RandomStream rng(seed);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(num_classes) * n_per_class);
  int id = id_offset;
  for (int k = 0; k < num_classes; ++k) {
    for (int j = 0; j < n_per_class; ++j) {
      Sample s;
      s.id = id++;
      s.x.resize(dim);
      for (int d = 0; d < dim; ++d) s.x[d] = centers[k][d] + rng.normal();
      s.clean_label = k;
      s.observed_label = k;
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

namespace {

int num_classes_of(const std::vector<Sample>& samples) {
  int k = 0;
  for (const Sample& s : samples) k = std::max(k, s.clean_label + 1);
  return k;
}

std::vector<Vec> empirical_centers(const std::vector<Sample>& samples, int k) {
  const int dim = static_cast<int>(samples.front().x.size());
  std::vector<Vec> centers(k, Vec(dim, 0.0));
  std::vector<int> counts(k, 0);
  for (const Sample& s : samples) {
    axpy(1.0, s.x, centers[s.clean_label]);
    ++counts[s.clean_label];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      throw InvalidInputError("inject_noise: class " + std::to_string(c) +
                              " has no samples");
    }
    for (double& v : centers[c]) v /= counts[c];
  }
  return centers;
}

double distance(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void inject_symmetric(std::vector<Sample>& samples, const NoiseSpec& spec,
                      int k, RandomStream& rng) {
  for (Sample& s : samples) {
    const double u = rng.uniform01();
    if (u < spec.rate) {
      const int offset = rng.uniform_int(0, k - 2);
      s.observed_label = offset >= s.clean_label ? offset + 1 : offset;
    }
  }
}

void inject_asymmetric(std::vector<Sample>& samples, const NoiseSpec& spec,
                       int k, RandomStream& rng) {
  if (spec.rate > 0.0) {
    bool moves = false;
    for (const auto& [from, to] : spec.class_map) {
      if (from < 0 || from >= k || to < 0 || to >= k) {
        throw InvalidConfigError("noise.class_map: label outside [0, K)");
      }
      if (from != to) moves = true;
    }
    if (!moves) {
      throw InvalidConfigError(
          "noise.class_map: must move at least one class when rate > 0");
    }
  }
  for (Sample& s : samples) {
    const double u = rng.uniform01();
    if (u < spec.rate) {
      auto it = spec.class_map.find(s.clean_label);
      if (it != spec.class_map.end()) s.observed_label = it->second;
    }
  }
}

void inject_instance_dependent(std::vector<Sample>& samples,
                               const NoiseSpec& spec, int k,
                               RandomStream& rng) {
  const std::vector<Vec> centers = empirical_centers(samples, k);
  const std::size_t n = samples.size();
  Vec proximity(n, 0.0);
  std::vector<int> nearest_other(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    const double d_own = distance(s.x, centers[s.clean_label]);
    double d_other = std::numeric_limits<double>::infinity();
    int other = -1;
    for (int c = 0; c < k; ++c) {
      if (c == s.clean_label) continue;
      const double d = distance(s.x, centers[c]);
      if (d < d_other) {
        d_other = d;
        other = c;
      }
    }
    nearest_other[i] = other;
    proximity[i] = d_own / (d_own + d_other);
  }

  // Scale flip probabilities min(1, scale * proximity) so their mean hits
  // the requested rate. The mean is monotone in scale; bisect.
  auto realized = [&proximity, n](double scale) {
    double acc = 0.0;
    for (double rho : proximity) acc += std::min(1.0, scale * rho);
    return acc / static_cast<double>(n);
  };
  double lo = 0.0, hi = 1.0;
  while (realized(hi) < spec.rate && hi < 1e12) hi *= 2.0;
  if (realized(hi) < spec.rate) {
    throw InvalidConfigError(
        "noise.rate: unreachable for instance_dependent noise on this data");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (realized(mid) < spec.rate ? lo : hi) = mid;
  }
  const double scale = 0.5 * (lo + hi);

  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    if (u < std::min(1.0, scale * proximity[i])) {
      samples[i].observed_label = nearest_other[i];
    }
  }
}

}  // namespace

void inject_noise(std::vector<Sample>& samples, const NoiseSpec& spec) {
  if (spec.rate < 0.0 || spec.rate >= 1.0) {
    throw InvalidConfigError("noise.rate: must be in [0, 1)");
  }
  if (samples.empty()) return;
  const int k = num_classes_of(samples);
  if (k < 2) {
    throw InvalidInputError("inject_noise: need at least 2 classes");
  }
  RandomStream rng(spec.seed);
  if (spec.rate > 0.0) {
    switch (spec.kind) {
      case NoiseKind::Symmetric:
        inject_symmetric(samples, spec, k, rng);
        break;
      case NoiseKind::Asymmetric:
        inject_asymmetric(samples, spec, k, rng);
        break;
      case NoiseKind::InstanceDependent:
        inject_instance_dependent(samples, spec, k, rng);
        break;
    }
  }
  for (Sample& s : samples) s.is_noisy = s.observed_label != s.clean_label;
}

void tag_hard_clean(std::vector<Sample>& samples, const Vec& per_sample_loss,
                    double fraction) {
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw InvalidConfigError("hard_clean_fraction: must be in (0, 1)");
  }
  if (per_sample_loss.size() != samples.size()) {
    throw InvalidInputError("tag_hard_clean: loss vector size mismatch");
  }
  std::vector<std::size_t> clean;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].is_hard_clean = false;
    if (!samples[i].is_noisy) clean.push_back(i);
  }
  if (clean.empty()) return;
  const std::size_t count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(clean.size())));
  std::sort(clean.begin(), clean.end(),
            [&](std::size_t a, std::size_t b) {
              if (per_sample_loss[a] != per_sample_loss[b]) {
                return per_sample_loss[a] > per_sample_loss[b];
              }
              return samples[a].id < samples[b].id;
            });
  for (std::size_t r = 0; r < count && r < clean.size(); ++r) {
    samples[clean[r]].is_hard_clean = true;
  }
}

void write_dataset_csv(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_dataset_csv: cannot open " + path);
  const int dim = samples.empty() ? 0 : static_cast<int>(samples.front().x.size());
  out << "id,y,y_obs";
  for (int d = 0; d < dim; ++d) out << ",x_" << d;
  out << "\n";
  char buf[64];
  for (const Sample& s : samples) {
    out << s.id << "," << s.clean_label << "," << s.observed_label;
    for (double v : s.x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

std::vector<Sample> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInputError("read_dataset_csv: empty file " + path);
  }
  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Sample s;
    std::getline(ss, field, ',');
    s.id = std::stoi(field);
    std::getline(ss, field, ',');
    s.clean_label = std::stoi(field);
    std::getline(ss, field, ',');
    s.observed_label = std::stoi(field);
    while (std::getline(ss, field, ',')) s.x.push_back(std::stod(field));
    s.is_noisy = s.observed_label != s.clean_label;
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace rgc
