#include "synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "oscar/geometry.hpp"

namespace oscar::testing {

std::vector<float> random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (;;) {
    for (auto& x : v) x = normal(rng);
    if (std::any_of(v.begin(), v.end(), [](float x) { return x != 0.0f; })) return v;
  }
}

SyntheticDb make_synthetic_db(std::mt19937_64& rng, const SyntheticOptions& options) {
  SyntheticDb db;
  std::uniform_int_distribution<int> n_dist(options.min_objects, options.max_objects);
  std::uniform_int_distribution<int> k_dist(1, options.max_views);
  std::uniform_int_distribution<int> d_dist(2, options.max_dim);
  std::bernoulli_distribution incomplete(options.incomplete_probability);

  db.view_count = k_dist(rng);
  db.dim_text = d_dist(rng);
  db.dim_vision = d_dist(rng);
  const int n = n_dist(rng);

  // Ids are shuffled so that storage order differs from lexicographic order.
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int i = 0; i < n; ++i) {
    SyntheticObject o;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "obj_%03d", ids[i]);
    o.model_id = buf;
    if (options.num_classes > 0) o.class_label = "class_" + std::to_string(ids[i] % options.num_classes);
    for (int k = 0; k < db.view_count; ++k) {
      o.captions.push_back(random_vector(rng, db.dim_text));
      o.views.push_back(random_vector(rng, db.dim_vision));
    }
    if (incomplete(rng)) o.dropped_caption_embeddings = 1;
    db.objects.push_back(std::move(o));
  }
  return db;
}

NewObject make_complete_object(const std::string& model_id, int view_count,
                               const FloatRows& captions, const FloatRows& views,
                               PromptType prompt) {
  NewObject obj;
  obj.model_id = model_id;
  const auto poses = generate_viewpoints(view_count, std::vector<double>{0.0}, 1.0);
  for (int k = 0; k < static_cast<int>(views.size()); ++k) {
    const std::string key = view_embedding_key(model_id, k);
    obj.views.push_back({k, poses[k], "renders/" + model_id + "/" + std::to_string(k) + ".png", key});
    obj.embeddings.emplace_back(key, EmbeddingVector{Space::kVisionOnly, views[k]});
  }
  for (int k = 0; k < static_cast<int>(captions.size()); ++k) {
    const std::string key = caption_embedding_key(model_id, k, prompt);
    obj.captions.push_back({k, prompt, "caption of " + model_id + " view " + std::to_string(k), key});
    obj.embeddings.emplace_back(key, EmbeddingVector{Space::kTextAligned, captions[k]});
  }
  return obj;
}

ObjectIndex build_index(const SyntheticDb& db) {
  ObjectIndex index = create_index(db.dim_text, db.dim_vision, db.view_count);
  for (const auto& o : db.objects) {
    NewObject obj = make_complete_object(o.model_id, db.view_count, o.captions, o.views);
    obj.class_label = o.class_label;
    // Drop the trailing caption embeddings (records stay).
    for (int d = 0; d < o.dropped_caption_embeddings; ++d) {
      auto it = std::find_if(obj.embeddings.rbegin(), obj.embeddings.rend(), [](const auto& e) {
        return e.second.space == Space::kTextAligned;
      });
      obj.embeddings.erase(std::next(it).base());
    }
    index.add_object(std::move(obj));
  }
  return index;
}

Query make_query(std::mt19937_64& rng, const SyntheticDb& db, std::string query_id) {
  Query q;
  q.query_id = std::move(query_id);
  std::bernoulli_distribution near_object(0.6);
  std::normal_distribution<float> noise(0.0f, 0.6f);
  if (near_object(rng) && !db.objects.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, db.objects.size() - 1);
    const auto& o = db.objects[pick(rng)];
    std::uniform_int_distribution<std::size_t> view(0, o.views.size() - 1);
    q.q_clip.values = o.captions[view(rng)];
    q.q_dino.values = o.views[view(rng)];
    for (auto& x : q.q_clip.values) x += noise(rng);
    for (auto& x : q.q_dino.values) x += noise(rng);
  } else {
    q.q_clip.values = random_vector(rng, db.dim_text);
    q.q_dino.values = random_vector(rng, db.dim_vision);
  }
  return q;
}

}  // namespace oscar::testing
