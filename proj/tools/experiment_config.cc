// Copyright 2026 The fltop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "experiment_config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <string_view>
#include <utility>

#include "fltop/error.h"
#include "fltop/random.h"
#include "fltop/scheme.h"

namespace fltop::cli {
namespace {

using nlohmann::json;

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + " must be a JSON object");
  }

  bool Has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  const json& Raw(const std::string& key) {
    known_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (!Has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(Where(key) + " has the wrong type");
    }
  }

  void ReadCount(const std::string& key, std::size_t& out) {
    if (!Has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(Where(key) + " must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void ReadInt(const std::string& key, int& out) {
    if (!Has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(Where(key) + " must be an integer");
    out = v.get<int>();
  }

  void ReadSeed(const std::string& key, std::uint64_t& out) {
    if (!Has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(Where(key) + " must be a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void ReadPath(const std::string& key, std::filesystem::path& out,
                const std::filesystem::path& base) {
    if (!Has(key)) return;
    std::string s;
    Read(key, s);
    out = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s) : base / s;
  }

  std::filesystem::path RequirePath(const std::string& key,
                                    const std::filesystem::path& base) {
    if (!Has(key)) throw ConfigError(Where(key) + " is required");
    std::filesystem::path p;
    ReadPath(key, p, base);
    return p;
  }

  std::string Where(const std::string& key) const { return path_ + "." + key; }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known_.contains(it.key())) {
        throw ConfigError("unknown key " + Where(it.key()));
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

SyntheticSource ParseSynthetic(const json& j) {
  ObjectReader r(j, "dataset.synthetic");
  SyntheticSource s;
  r.ReadCount("samples", s.options.samples);
  r.ReadCount("features", s.options.features);
  r.Read("positive_rate", s.options.positive_rate);
  r.Read("separation", s.options.separation);
  r.ReadCount("informative", s.options.informative);
  r.ReadCount("dense", s.options.dense);
  r.ReadSeed("seed", s.options.seed);
  r.Read("test_fraction", s.test_fraction);
  r.Finish();
  if (!(s.test_fraction > 0.0 && s.test_fraction < 1.0)) {
    throw ConfigError("dataset.synthetic.test_fraction must lie in (0, 1)");
  }
  return s;
}

IdxSource ParseIdx(const json& j, const std::filesystem::path& base) {
  ObjectReader r(j, "dataset.fashion_mnist");
  IdxSource s;
  s.train_images = r.RequirePath("train_images", base);
  s.train_labels = r.RequirePath("train_labels", base);
  s.test_images = r.RequirePath("test_images", base);
  s.test_labels = r.RequirePath("test_labels", base);
  if (r.Has("public_images") || r.Has("public_labels")) {
    s.public_images = r.RequirePath("public_images", base);
    s.public_labels = r.RequirePath("public_labels", base);
  }
  r.Finish();
  for (const auto* p : {&s.train_images, &s.train_labels, &s.test_images, &s.test_labels}) {
    if (!std::filesystem::exists(*p)) {
      throw ConfigError("dataset file " + p->string() + " does not exist");
    }
  }
  return s;
}

DatasetConfig ParseDataset(const json& j, const std::filesystem::path& base) {
  ObjectReader r(j, "dataset");
  DatasetConfig d;
  const bool synthetic = r.Has("synthetic");
  const bool idx = r.Has("fashion_mnist");
  if (synthetic == idx) {
    throw ConfigError("dataset needs exactly one of 'synthetic' and 'fashion_mnist'");
  }
  if (synthetic) {
    d.source = ParseSynthetic(r.Raw("synthetic"));
  } else {
    d.source = ParseIdx(r.Raw("fashion_mnist"), base);
  }
  if (r.Has("partition")) {
    std::string mode;
    r.Read("partition", mode);
    try {
      d.partition = data::ParsePartitionMode(mode);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  r.ReadCount("labels_per_client", d.labels_per_client);
  r.Read("downsample", d.downsample);
  r.ReadCount("public_size", d.public_size);
  r.Finish();
  if (d.public_size == 0) throw ConfigError("dataset.public_size must be >= 1");
  return d;
}

ModelConfig ParseModel(const json& j) {
  ObjectReader r(j, "model");
  ModelConfig m;
  if (r.Has("hidden")) {
    const json& h = r.Raw("hidden");
    if (!h.is_array()) throw ConfigError("model.hidden must be an array");
    m.hidden.clear();
    for (const json& w : h) {
      if (!w.is_number_integer() || w.get<long long>() < 1) {
        throw ConfigError("model.hidden entries must be positive integers");
      }
      m.hidden.push_back(w.get<std::size_t>());
    }
  }
  if (r.Has("activation")) {
    std::string a;
    r.Read("activation", a);
    try {
      m.activation = nn::ParseActivation(a);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  r.Finish();
  return m;
}

void ParseFederation(const json& j, FederationConfig& f) {
  ObjectReader r(j, "federation");
  r.ReadCount("num_clients", f.num_clients);
  r.Read("sampling", f.sampling);
  r.ReadInt("rounds", f.rounds);
  r.ReadInt("local_steps", f.local.steps);
  r.Read("learning_rate", f.local.learning_rate);
  r.ReadCount("batch_size", f.local.batch_size);
  r.Read("ratio", f.ratio);
  r.ReadInt("init_steps", f.init_steps);
  r.Read("noise_multiplier", f.noise_multiplier);
  r.Read("delta", f.delta);
  if (r.Has("sensitivity")) {
    const json& s = r.Raw("sensitivity");
    if (s.is_string() && s.get<std::string>() == "calibrate") {
      f.sensitivity.reset();
    } else if (s.is_number()) {
      f.sensitivity = s.get<double>();
    } else {
      throw ConfigError("federation.sensitivity must be a number or \"calibrate\"");
    }
  }
  r.ReadInt("frac_bits", f.frac_bits);
  r.ReadInt("lambda_max", f.lambda_max);
  r.Finish();
}

void ParseSeeds(const json& j, Seeds& s) {
  ObjectReader r(j, "seeds");
  r.ReadSeed("model", s.model);
  r.ReadSeed("sampling", s.sampling);
  r.ReadSeed("noise", s.noise);
  r.ReadSeed("masks", s.masks);
  r.Finish();
}

json PathJson(const std::filesystem::path& p) { return p.string(); }

Dataset MaybeDownsample(const Dataset& d, bool enabled, std::uint64_t seed) {
  return enabled ? data::Downsample(d, seed) : d;
}

// Removes `count` random rows from `pool` and returns them.
Dataset HoldOut(Dataset& pool, std::size_t count, std::uint64_t seed) {
  if (count >= pool.size()) {
    throw ConfigError("dataset.public_size must be smaller than the training set");
  }
  Rng rng = MakeStream(seed, StreamTag::kPublic);
  const std::vector<std::size_t> held = SampleIndices(pool.size(), count, rng);
  std::vector<std::size_t> kept;
  kept.reserve(pool.size() - count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (next < held.size() && held[next] == i) {
      ++next;
    } else {
      kept.push_back(i);
    }
  }
  Dataset out = Subset(pool, held, pool.name + "-public");
  pool = Subset(pool, kept, pool.name);
  return out;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const json& j,
                                       const std::filesystem::path& base_dir) {
  ObjectReader r(j, "config");
  ExperimentConfig c;
  r.Read("scheme", c.scheme);
  try {
    c.federation.scheme = SchemeByName(c.scheme);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  r.ReadPath("output_dir", c.output_dir, base_dir);
  if (!r.Has("dataset")) throw ConfigError("config.dataset is required");
  c.dataset = ParseDataset(r.Raw("dataset"), base_dir);
  if (r.Has("model")) c.model = ParseModel(r.Raw("model"));
  if (r.Has("federation")) ParseFederation(r.Raw("federation"), c.federation);
  if (r.Has("seeds")) ParseSeeds(r.Raw("seeds"), c.federation.seeds);
  if (r.Has("index_file")) {
    std::filesystem::path p;
    r.ReadPath("index_file", p, base_dir);
    if (!std::filesystem::exists(p)) {
      throw ConfigError("index_file " + p.string() + " does not exist");
    }
    c.index_file = p;
  }
  r.Finish();
  try {
    c.federation.Validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return ParseExperimentConfig(j, path.parent_path());
}

json ResolvedConfigJson(const ExperimentConfig& c) {
  json dataset;
  if (const auto* s = std::get_if<SyntheticSource>(&c.dataset.source)) {
    dataset["synthetic"] = {
        {"samples", s->options.samples},
        {"features", s->options.features},
        {"positive_rate", s->options.positive_rate},
        {"separation", s->options.separation},
        {"informative", s->options.informative},
        {"dense", s->options.dense},
        {"seed", s->options.seed},
        {"test_fraction", s->test_fraction},
    };
  } else {
    const auto& x = std::get<IdxSource>(c.dataset.source);
    json idx = {
        {"train_images", PathJson(x.train_images)},
        {"train_labels", PathJson(x.train_labels)},
        {"test_images", PathJson(x.test_images)},
        {"test_labels", PathJson(x.test_labels)},
    };
    if (x.public_images) {
      idx["public_images"] = PathJson(*x.public_images);
      idx["public_labels"] = PathJson(*x.public_labels);
    }
    dataset["fashion_mnist"] = idx;
  }
  dataset["partition"] = std::string(data::PartitionModeName(c.dataset.partition));
  dataset["labels_per_client"] = c.dataset.labels_per_client;
  dataset["downsample"] = c.dataset.downsample;
  dataset["public_size"] = c.dataset.public_size;

  const FederationConfig& f = c.federation;
  json federation = {
      {"num_clients", f.num_clients},
      {"sampling", f.sampling},
      {"rounds", f.rounds},
      {"local_steps", f.local.steps},
      {"learning_rate", f.local.learning_rate},
      {"batch_size", f.local.batch_size},
      {"ratio", f.ratio},
      {"init_steps", f.init_steps},
      {"noise_multiplier", f.noise_multiplier},
      {"delta", f.delta},
      {"frac_bits", f.frac_bits},
      {"lambda_max", f.lambda_max},
  };
  if (f.sensitivity) {
    federation["sensitivity"] = *f.sensitivity;
  } else {
    federation["sensitivity"] = "calibrate";
  }

  json out = {
      {"scheme", c.scheme},
      {"output_dir", PathJson(c.output_dir)},
      {"dataset", dataset},
      {"model",
       {{"hidden", c.model.hidden},
        {"activation", std::string(nn::ActivationName(c.model.activation))}}},
      {"federation", federation},
      {"seeds",
       {{"model", f.seeds.model},
        {"sampling", f.seeds.sampling},
        {"noise", f.seeds.noise},
        {"masks", f.seeds.masks}}},
  };
  if (c.index_file) out["index_file"] = PathJson(*c.index_file);
  return out;
}

nn::ArchSpec BuildArch(const ExperimentConfig& config, std::size_t features,
                       int num_classes) {
  const std::size_t outputs = num_classes == 2 ? 1 : static_cast<std::size_t>(num_classes);
  return nn::ArchSpec::Mlp(features, config.model.hidden, outputs,
                           config.model.activation);
}

FederationData LoadFederationData(const ExperimentConfig& config) {
  const DatasetConfig& d = config.dataset;
  const Seeds& seeds = config.federation.seeds;
  Dataset train;
  Dataset test;
  Dataset public_data;
  if (const auto* s = std::get_if<SyntheticSource>(&d.source)) {
    const Dataset all = data::SynthImbalanced(s->options);
    std::tie(train, test) = data::TrainTestSplit(
        all, s->test_fraction, DeriveSeed(seeds.sampling, StreamTag::kSplit));
    data::SynthOptions fresh = s->options;
    fresh.samples = d.public_size;
    fresh.seed = DeriveSeed(s->options.seed, StreamTag::kPublic);
    public_data = MaybeDownsample(data::SynthImbalanced(fresh), d.downsample,
                                  DeriveSeed(seeds.sampling, StreamTag::kDownsample, {1}));
    train = MaybeDownsample(train, d.downsample,
                            DeriveSeed(seeds.sampling, StreamTag::kDownsample, {0}));
  } else {
    const auto& x = std::get<IdxSource>(d.source);
    train = data::LoadIdx(x.train_images, x.train_labels);
    test = data::LoadIdx(x.test_images, x.test_labels);
    train = MaybeDownsample(train, d.downsample,
                            DeriveSeed(seeds.sampling, StreamTag::kDownsample, {0}));
    if (x.public_images) {
      const Dataset pool = data::LoadIdx(*x.public_images, *x.public_labels);
      public_data = data::PublicBatch(pool, d.public_size,
                                      DeriveSeed(seeds.sampling, StreamTag::kPublic));
    } else {
      public_data = HoldOut(train, d.public_size, seeds.sampling);
    }
  }
  if (train.size() < config.federation.num_clients) {
    throw ConfigError("training set has " + std::to_string(train.size()) +
                      " rows, fewer than num_clients");
  }
  const data::Partition p = data::MakePartition(
      train, config.federation.num_clients, d.partition,
      DeriveSeed(seeds.sampling, StreamTag::kPartition), d.labels_per_client);
  FederationData out;
  out.clients = data::Materialize(train, p);
  out.test = std::move(test);
  out.public_data = std::move(public_data);
  return out;
}

double EstimatedWork(const ExperimentConfig& config, std::size_t parameters) {
  const FederationConfig& f = config.federation;
  const double per_step = 6.0 * static_cast<double>(parameters) *
                          static_cast<double>(f.local.batch_size);
  return static_cast<double>(f.rounds) * static_cast<double>(f.CohortSize()) *
         static_cast<double>(f.local.steps) * per_step;
}

}  // namespace fltop::cli
