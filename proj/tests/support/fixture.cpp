#include "fixture.hpp"

#include "topictrend/config.hpp"
#include "topictrend/persistence.hpp"
#include "topictrend/pipeline.hpp"

namespace synth {

using namespace topictrend;

const SmallModel& small_model() {
  static const SmallModel m = [] {
    SmallModel s;
    s.options.documents = 2500;
    s.options.topics = 4;
    s.options.dim = 64;
    s.dir = scratch_dir("small-model");
    s.corpus = planted_corpus(s.options);
    s.config = write_planted(s.dir, s.corpus, s.options);
    const auto cfg = config::Config::load(s.config);
    const auto prepared = pipeline::prepare(cfg);
    const auto emb = pipeline::load_embeddings(cfg, cfg.path_or_empty("embeddings.path"));
    auto model = pipeline::fit(prepared.corpus, emb, pipeline::fit_options_from(cfg));
    s.artifact = s.dir / "model";
    persistence::save_model(model, s.artifact);
    s.fitted = std::make_shared<TopicModel>(std::move(model));
    s.reloaded = std::make_shared<TopicModel>(persistence::load_model(s.artifact));
    return s;
  }();
  return m;
}

}  // namespace synth
