#include "slrkit/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "slrkit/errors.hpp"
#include "slrkit/rng.hpp"

namespace slrkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// Per-class motion template. Parameters depend only on the effective class
/// index, so a class keeps its motion across corpora and seeds.
struct ClassTemplate {
  int shape = 0;  // 0 ellipse, 1 lissajous, 2 pendulum
  Vec2 center;
  Vec2 amplitude;
  double freq = 1.0;   // cycles per clip
  double phase = 0.0;
  bool two_handed = false;
  double rot_amount = 0.0;  // hand waggle
  double z_amp = 0.02;

  static ClassTemplate of(size_t effective_class) {
    Rng rng(Rng::derive(0x636c617373ULL, effective_class));  // "class" stream
    ClassTemplate t;
    t.shape = static_cast<int>(effective_class % 3);
    t.center = {0.58 + 0.14 * (rng.uniform() - 0.5), 0.46 + 0.18 * (rng.uniform() - 0.5)};
    t.amplitude = {0.055 + 0.09 * rng.uniform(), 0.055 + 0.09 * rng.uniform()};
    t.freq = 0.75 + 1.0 * rng.uniform();
    t.phase = 2.0 * kPi * rng.uniform();
    t.two_handed = effective_class % 2 == 0;
    t.rot_amount = 0.15 + 0.35 * rng.uniform();
    t.z_amp = 0.01 + 0.03 * rng.uniform();
    return t;
  }

  Vec2 wrist_at(double tau, double speed, double phase_jitter) const {
    const double ph = phase + phase_jitter;
    const double w = 2.0 * kPi * freq * speed;
    switch (shape) {
      case 0:
        return {center.x + amplitude.x * std::cos(w * tau + ph),
                center.y + amplitude.y * std::sin(w * tau + ph)};
      case 1:
        return {center.x + amplitude.x * std::sin(w * tau + ph),
                center.y + amplitude.y * std::sin(2.0 * (w * tau + ph))};
      default: {
        const double theta = 1.1 * std::sin(w * tau + ph);
        return {center.x + 1.4 * amplitude.x * std::sin(theta),
                center.y + 1.4 * amplitude.y * (1.0 - std::cos(theta))};
      }
    }
  }
};

struct SignerStyle {
  double dx = 0.0, dy = 0.0, scale = 1.0;

  static SignerStyle of(uint64_t seed, size_t signer, const SyntheticCorpusConfig& cfg) {
    Rng rng(Rng::derive(seed, 0x7369676eULL, signer));  // "sign(er)" stream
    SignerStyle s;
    s.dx = cfg.translation_jitter * (2.0 * rng.uniform() - 1.0);
    s.dy = cfg.translation_jitter * (2.0 * rng.uniform() - 1.0);
    s.scale = 1.0 + cfg.scale_jitter * (2.0 * rng.uniform() - 1.0);
    return s;
  }

  Vec2 apply(Vec2 p) const {
    return {0.5 + scale * (p.x - 0.5) + dx, 0.5 + scale * (p.y - 0.5) + dy};
  }
};

/// Rest position of a body keypoint, picked by landmark name. The left side
/// of the signer is rendered at x > 0.5.
Vec2 body_rest(const std::string& name, size_t index) {
  const bool left = name.rfind("left", 0) == 0;
  const double side = left ? 1.0 : -1.0;
  auto has = [&](const char* s) { return name.find(s) != std::string::npos; };
  if (has("nose")) return {0.5, 0.18};
  if (has("eye")) return {0.5 + side * 0.03, 0.16};
  if (has("ear")) return {0.5 + side * 0.06, 0.18};
  if (has("mouth")) return {0.5 + side * 0.02, 0.23};
  if (has("neck")) return {0.5, 0.285};
  if (has("shoulder")) return {0.5 + side * 0.12, 0.30};
  if (has("hip")) return {0.5 + side * 0.07, 0.78};
  // anything unrecognized sits deterministically inside the torso box
  const double u = static_cast<double>(Rng::derive(0x72657374ULL, index) % 1000) / 1000.0;
  return {0.42 + 0.16 * u, 0.4 + 0.2 * u};
}

/// Local hand landmark template: wrist at the origin, fingers fanning upward,
/// middle knuckle at radius 0.45. Index follows the 21-landmark convention.
Vec2 hand_local(size_t local_index) {
  if (local_index == 0) return {0.0, 0.0};
  const size_t finger = (local_index - 1) / 4;  // 0 thumb .. 4 pinky
  const size_t joint = (local_index - 1) % 4;   // 0 mcp .. 3 tip
  const double angle = (-0.9 + 0.45 * static_cast<double>(finger));  // radians from +y
  const double radius = 0.45 + 0.18 * static_cast<double>(joint) -
                        (finger == 0 ? 0.12 : 0.0);  // thumb is shorter
  return {radius * std::sin(angle), radius * std::cos(angle)};
}

size_t sample_gap_length(Rng& rng, double mean) {
  if (mean <= 1.0) return 1;
  const double q = 1.0 / mean;
  const double u = rng.uniform();
  const double len = std::ceil(std::log(1.0 - u) / std::log(1.0 - q));
  return len < 1.0 ? 1 : static_cast<size_t>(len);
}

/// Marks absence over one track: at each frame outside a gap, a gap starts
/// with gap_probability and lasts a geometric number of frames.
std::vector<uint8_t> gap_track(Rng& rng, size_t frames, const SyntheticCorpusConfig& cfg) {
  std::vector<uint8_t> present(frames, 1);
  size_t remaining = 0;
  for (size_t t = 0; t < frames; ++t) {
    if (remaining > 0) {
      present[t] = 0;
      --remaining;
      continue;
    }
    if (cfg.gap_probability > 0.0 && rng.uniform() < cfg.gap_probability) {
      present[t] = 0;
      remaining = sample_gap_length(rng, cfg.mean_gap_length) - 1;
    }
  }
  return present;
}

}  // namespace

void SyntheticCorpusConfig::validate() const {
  if (signers < 1 || classes < 1 || sequences_per_class < 1)
    throw ContractError("signers, classes and sequences_per_class must be >= 1");
  if (min_frames < 1 || max_frames < min_frames)
    throw ContractError("need 1 <= min_frames <= max_frames");
  if (gap_probability < 0.0 || gap_probability > 1.0)
    throw ContractError("gap_probability must be in [0, 1]");
  if (mean_gap_length < 1.0) throw ContractError("mean_gap_length must be >= 1");
  if (translation_jitter < 0.0 || scale_jitter < 0.0 || scale_jitter >= 1.0)
    throw ContractError("jitter values out of range");
  if (noise_std < 0.0) throw ContractError("noise_std must be >= 0");
  if (gap_probability > 0.0 && family == EstimatorFamily::mmpose)
    throw ContractError("mmpose keypoints are always present; gap injection is N/A");
}

double SyntheticCorpusConfig::expected_missing_fraction() const {
  const double p = gap_probability, m = mean_gap_length;
  if (p <= 0.0) return 0.0;
  return p * m / (1.0 - p + p * m);
}

void SyntheticCorpusConfig::set_missing_fraction(double target) {
  if (target < 0.0 || target >= 1.0) throw ContractError("missing fraction must be in [0, 1)");
  gap_probability = target / (mean_gap_length * (1.0 - target) + target);
}

SyntheticCorpus gen_synthetic(const SyntheticCorpusConfig& config) {
  config.validate();
  const SkeletonLayout& layout = layout_for(config.family);
  const bool with_confidence = config.family != EstimatorFamily::mediapipe;
  const GroupRange& body = layout.group(GroupName::body);
  const GroupRange& left_hand = layout.group(GroupName::left_hand);
  const GroupRange& right_hand = layout.group(GroupName::right_hand);

  SyntheticCorpus corpus;
  size_t file_index = 0;
  for (size_t signer = 0; signer < config.signers; ++signer) {
    const SignerStyle style = SignerStyle::of(config.seed, signer, config);
    for (size_t cls = 0; cls < config.classes; ++cls) {
      const ClassTemplate tpl = ClassTemplate::of(config.class_offset + cls);
      for (size_t rep = 0; rep < config.sequences_per_class; ++rep, ++file_index) {
        Rng rng(Rng::derive(config.seed, 0x736571ULL, file_index));  // "seq" stream

        const size_t frames =
            config.min_frames + static_cast<size_t>(rng.below(config.max_frames -
                                                              config.min_frames + 1));
        const double speed = 0.9 + 0.2 * rng.uniform();
        const double phase_jitter = 2.0 * kPi * rng.uniform();
        const double rot_phase = 2.0 * kPi * rng.uniform();

        KeypointSequence seq = KeypointSequence::zeros(layout, frames, with_confidence);
        auto zero_pad3 = [](size_t v) {
          std::string s = std::to_string(v);
          return s.size() >= 3 ? s : std::string(3 - s.size(), '0') + s;
        };
        seq.label = config.label_prefix + zero_pad3(config.class_offset + cls);
        seq.signer_id = "s" + zero_pad3(signer);

        for (size_t t = 0; t < frames; ++t) {
          const double tau =
              frames == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(frames - 1);
          const Vec2 right_wrist = tpl.wrist_at(tau, speed, phase_jitter);
          Vec2 left_wrist;
          if (tpl.two_handed) {
            const Vec2 w = tpl.wrist_at(tau, speed, phase_jitter + kPi);
            left_wrist = {1.0 - w.x, w.y};  // mirrored counter-motion
          } else {
            left_wrist = {0.66, 0.62 + 0.01 * std::sin(2.0 * kPi * tau + phase_jitter)};
          }
          const double waggle =
              tpl.rot_amount * std::sin(2.0 * kPi * tpl.freq * speed * tau + rot_phase);

          auto place = [&](size_t k, Vec2 p, double z) {
            const Vec2 styled = style.apply(p);
            seq.at(t, k, 0) = styled.x;
            seq.at(t, k, 1) = styled.y;
            if (seq.dims == 3) seq.at(t, k, 2) = style.scale * z;
          };

          for (size_t k = body.begin; k < body.end; ++k) {
            const std::string& name = layout.keypoint_names[k];
            const bool left = name.rfind("left", 0) == 0;
            const Vec2 wrist = left ? left_wrist : right_wrist;
            const Vec2 shoulder{left ? 0.62 : 0.38, 0.30};
            Vec2 p;
            if (name.find("wrist") != std::string::npos) {
              p = wrist;
            } else if (name.find("elbow") != std::string::npos) {
              p = {0.5 * (shoulder.x + wrist.x) + (left ? 0.04 : -0.04),
                   0.5 * (shoulder.y + wrist.y) + 0.03};
            } else if (name.find("pinky") != std::string::npos ||
                       name.find("index") != std::string::npos ||
                       name.find("thumb") != std::string::npos) {
              p = {wrist.x, wrist.y + 0.03};  // hand-root landmarks ride the wrist
            } else {
              p = body_rest(name, k);
            }
            place(k, p, 0.0);
          }

          const double z_hand = tpl.z_amp * std::sin(2.0 * kPi * tpl.freq * speed * tau +
                                                     phase_jitter);
          auto place_hand = [&](const GroupRange& hand, Vec2 wrist, bool mirror) {
            const double hand_size = 0.13;
            const double cw = std::cos(waggle), sw = std::sin(waggle);
            for (size_t k = hand.begin; k < hand.end; ++k) {
              Vec2 local = hand_local(k - hand.begin);
              if (mirror) local.x = -local.x;
              // rotate by the waggle angle, flip y so fingers point up
              const Vec2 rotated{local.x * cw - local.y * sw, -(local.x * sw + local.y * cw)};
              place(k, {wrist.x + hand_size * rotated.x, wrist.y + hand_size * rotated.y},
                    z_hand);
            }
          };
          place_hand(left_hand, left_wrist, true);
          place_hand(right_hand, right_wrist, false);
        }

        if (config.noise_std > 0.0) {
          for (double& c : seq.coords) c += config.noise_std * rng.normal();
        }

        // absence injection, one track per granularity unit
        if (config.gap_probability > 0.0) {
          if (layout.missing_granularity == MissingGranularity::per_group) {
            for (const GroupRange& g : layout.groups) {
              const std::vector<uint8_t> present = gap_track(rng, frames, config);
              for (size_t t = 0; t < frames; ++t) {
                if (present[t]) continue;
                for (size_t k = g.begin; k < g.end; ++k) seq.set_present(t, k, false);
              }
            }
          } else {
            for (size_t k = 0; k < layout.keypoint_count; ++k) {
              const std::vector<uint8_t> present = gap_track(rng, frames, config);
              for (size_t t = 0; t < frames; ++t) {
                if (!present[t]) seq.set_present(t, k, false);
              }
            }
          }
          for (size_t t = 0; t < frames; ++t) {
            for (size_t k = 0; k < seq.keypoints; ++k) {
              if (seq.is_present(t, k)) continue;
              for (size_t d = 0; d < seq.dims; ++d) seq.at(t, k, d) = 0.0;
            }
          }
        }

        if (with_confidence) {
          for (size_t t = 0; t < frames; ++t) {
            for (size_t k = 0; k < seq.keypoints; ++k) {
              const double u = rng.uniform();
              seq.confidence[t * seq.keypoints + k] =
                  seq.is_present(t, k) ? 0.45 + 0.55 * (1.0 - u * u) : 0.0;
            }
          }
        }

        char file_buf[32];
        std::snprintf(file_buf, sizeof file_buf, "seq%05zu.kpseq", file_index);
        corpus.records.push_back({file_buf, *seq.label, *seq.signer_id});
        corpus.sequences.push_back(std::move(seq));
      }
    }
  }
  return corpus;
}

}  // namespace slrkit
