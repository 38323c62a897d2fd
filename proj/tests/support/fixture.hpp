#pragma once

// A small planted corpus fitted once per test binary and saved to disk.

#include <filesystem>
#include <memory>

#include "synthetic.hpp"
#include "topictrend/model.hpp"

namespace synth {

struct SmallModel {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path artifact;
  PlantedOptions options;
  PlantedCorpus corpus;
  std::shared_ptr<const topictrend::TopicModel> fitted;    // in memory
  std::shared_ptr<const topictrend::TopicModel> reloaded;  // from the artifact
};

const SmallModel& small_model();

}  // namespace synth
