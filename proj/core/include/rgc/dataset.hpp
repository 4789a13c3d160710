#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rgc/linalg.hpp"

namespace rgc {

/// One training example. The clean label is latent: it drives generation
/// and evaluation only, never training. is_noisy holds exactly when the
/// observed label differs from the clean one; hard-clean tags are
/// assigned once, after warm-up, and only to clean samples.
struct Sample {
  int id = 0;
  Vec x;
  int clean_label = 0;
  int observed_label = 0;
  bool is_noisy = false;
  bool is_hard_clean = false;
};

enum class NoiseKind { Symmetric, Asymmetric, InstanceDependent };

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Symmetric;
  double rate = 0.0;                // in [0, 1)
  std::map<int, int> class_map;     // asymmetric: y -> corrupted label
  std::uint64_t seed = 0;
};

/// Cluster centers used by the mixture generator: class k sits at
/// (separation / sqrt(2)) * e_k, so all pairwise center distances equal
/// `separation`. Requires dim >= num_classes.
std::vector<Vec> mixture_centers(int num_classes, int dim, double separation);

/// K isotropic unit-variance Gaussian clusters, n_per_class samples
/// each, ids assigned class-major starting at id_offset. Deterministic
/// per seed.
std::vector<Sample> make_gaussian_mixture(int num_classes, int n_per_class,
                                          int dim, double separation,
                                          std::uint64_t seed, int id_offset = 0);

/// Corrupts observed labels in place according to the spec. Never
/// touches x or the clean label; sets is_noisy exactly.
///  - symmetric: each sample flips with probability rate, uniformly to
///    one of the other K-1 classes.
///  - asymmetric: selected samples move to class_map(y); classes absent
///    from the map keep their label.
///  - instance-dependent: flip probability proportional to
///    d_own / (d_own + d_nearest_other) against empirical class centers,
///    rescaled so the expected flip rate equals rate; flipped samples
///    take the nearest other class. Boundary samples flip first.
void inject_noise(std::vector<Sample>& samples, const NoiseSpec& spec);

/// Marks the ceil(fraction * |clean|) clean samples with the highest
/// loss as hard-clean; ties broken toward the lower sample id. Resets
/// all previous tags.
void tag_hard_clean(std::vector<Sample>& samples, const Vec& per_sample_loss,
                    double fraction);

/// Delimited-text export: header then one row per sample with
/// id, clean label, observed label, and features at full precision.
/// Round-trips losslessly through read_dataset_csv.
void write_dataset_csv(const std::string& path, const std::vector<Sample>& samples);
std::vector<Sample> read_dataset_csv(const std::string& path);

}  // namespace rgc
