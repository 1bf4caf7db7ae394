// brown: class-based bigram agglomerative clustering (average mutual information).
//
// Active-window variant: the `window` most frequent types start as singleton
// clusters, remaining types are inserted by frequency rank, and each step
// merges the pair whose merge loses the least AMI of the class bigram model.
// Merge ties break toward the smallest (slot_a, slot_b) pair in ascending slot
// order under a strict less-than comparison. With window >= vocabulary size
// this is the exact agglomerative algorithm.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/features.hpp"

namespace histadapt {

struct BrownMergeRecord {
  int slot_a = -1, slot_b = -1;    // chosen pair, slot_a < slot_b
  double loss = 0.0;               // AMI lost by the chosen merge
  std::vector<int> assignment;     // word id -> slot before the merge; -1 = not inserted
  std::vector<int> active;         // active slots before the merge, ascending
  bool path_phase = false;         // merge past the C-cluster cut (path construction)
};

class BrownModel {
 public:
  static constexpr const char* kUnkFeature = "UNK";

  struct Entry {
    std::string word;
    std::string path;
    int64_t count = 0;
    int cluster = -1;
  };

  BrownModel() = default;
  BrownModel(int clusters, std::vector<Entry> entries) : clusters_(clusters) {
    entries_ = std::move(entries);
    // Canonical cluster ids: first-seen order of distinct paths over the
    // frequency-ranked entry list. Stable across save/load round trips.
    std::unordered_map<std::string, int> path_id;
    for (auto& e : entries_) {
      auto it = path_id.find(e.path);
      if (it == path_id.end()) it = path_id.emplace(e.path, static_cast<int>(path_id.size())).first;
      e.cluster = it->second;
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].word, i);
  }

  int clusters() const { return clusters_; }
  std::size_t vocabulary_size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  const Entry* find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  // Full merge path of the word's cluster; UNK for words the clustering never saw.
  const std::string& path_feature(const std::string& word) const {
    static const std::string unk = kUnkFeature;
    const Entry* e = find(word);
    return e ? e->path : unk;
  }

 private:
  int clusters_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

// Clustering state over a fixed slot capacity. Probabilities are normalized by
// the full-corpus bigram total, so uninserted types contribute no mass yet.
class BrownState {
 public:
  BrownState(std::size_t cap, int64_t total_bigrams) : cap_(cap), total_(total_bigrams) {
    n_.assign(cap_ * cap_, 0);
    nl_.assign(cap_, 0);
    nr_.assign(cap_, 0);
    inv_total_ = total_ > 0 ? 1.0 / static_cast<double>(total_) : 0.0;
    log_table_.resize(2 * static_cast<std::size_t>(std::max<int64_t>(total_, 1)) + 2);
    log_table_[0] = 0.0;
    for (std::size_t v = 1; v < log_table_.size(); ++v) {
      log_table_[v] = std::log(static_cast<double>(v));
    }
    log_total_ = log_table_[static_cast<std::size_t>(std::max<int64_t>(total_, 1))];
  }

  int64_t& n(int c, int d) {
    return n_[static_cast<std::size_t>(c) * cap_ + static_cast<std::size_t>(d)];
  }
  int64_t n(int c, int d) const {
    return n_[static_cast<std::size_t>(c) * cap_ + static_cast<std::size_t>(d)];
  }
  int64_t nl(int c) const { return nl_[static_cast<std::size_t>(c)]; }
  int64_t nr(int c) const { return nr_[static_cast<std::size_t>(c)]; }
  void add_left(int c, int64_t v) { nl_[static_cast<std::size_t>(c)] += v; }
  void add_right(int c, int64_t v) { nr_[static_cast<std::size_t>(c)] += v; }

  // q = p log(p / (pl * pr)) with p = count/total; zero for absent bigrams.
  double q_of(int64_t count, int64_t left, int64_t right) const {
    if (count <= 0) return 0.0;
    return static_cast<double>(count) * inv_total_ *
           (log_table_[static_cast<std::size_t>(count)] + log_total_ -
            log_table_[static_cast<std::size_t>(left)] -
            log_table_[static_cast<std::size_t>(right)]);
  }

  double q(int c, int d) const { return q_of(n(c, d), nl(c), nr(d)); }

  // Sum of all AMI terms touching cluster c, counting q(c,c) once.
  double s(int c, const std::vector<int>& active) const {
    double acc = 0.0;
    for (int d : active) {
      if (d == c) continue;
      acc += q(c, d) + q(d, c);
    }
    return acc + q(c, c);
  }

  double ami(const std::vector<int>& active) const {
    double acc = 0.0;
    for (int c : active)
      for (int d : active) acc += q(c, d);
    return acc;
  }

  // AMI loss of merging (i, j), evaluated fresh in O(active).
  double merge_loss(int i, int j, const std::vector<int>& active, double s_i, double s_j) const {
    const int64_t nl_ij = nl(i) + nl(j);
    const int64_t nr_ij = nr(i) + nr(j);
    double merged = q_of(n(i, i) + n(i, j) + n(j, i) + n(j, j), nl_ij, nr_ij);
    for (int d : active) {
      if (d == i || d == j) continue;
      merged += q_of(n(i, d) + n(j, d), nl_ij, nr(d));
      merged += q_of(n(d, i) + n(d, j), nl(d), nr_ij);
    }
    return s_i + s_j - q(i, j) - q(j, i) - merged;
  }

  // Fold cluster j into cluster i; j's counts are zeroed.
  void fold(int i, int j) {
    const int c = static_cast<int>(cap_);
    for (int d = 0; d < c; ++d) {
      if (d == i || d == j) continue;
      n(i, d) += n(j, d);
      n(d, i) += n(d, j);
      n(j, d) = 0;
      n(d, j) = 0;
    }
    n(i, i) += n(i, j) + n(j, i) + n(j, j);
    n(i, j) = 0;
    n(j, i) = 0;
    n(j, j) = 0;
    nl_[static_cast<std::size_t>(i)] += nl_[static_cast<std::size_t>(j)];
    nr_[static_cast<std::size_t>(i)] += nr_[static_cast<std::size_t>(j)];
    nl_[static_cast<std::size_t>(j)] = 0;
    nr_[static_cast<std::size_t>(j)] = 0;
  }

 private:
  std::size_t cap_;
  int64_t total_;
  double inv_total_;
  double log_total_;
  std::vector<int64_t> n_;
  std::vector<int64_t> nl_, nr_;
  std::vector<double> log_table_;
};

}  // namespace detail

inline BrownModel train_brown(const Corpus& corpus, int num_clusters, int window = 0,
                              std::vector<BrownMergeRecord>* trace = nullptr) {
  if (num_clusters < 2) throw Error("Brown clustering needs at least 2 clusters");
  if (window <= 0) window = 2 * num_clusters;

  // Type inventory ordered by frequency (desc), then lexicographically.
  std::unordered_map<std::string, int64_t> freq;
  for (const auto& doc : corpus.documents)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent.tokens) ++freq[tok.form];
  std::vector<std::pair<std::string, int64_t>> types(freq.begin(), freq.end());
  std::sort(types.begin(), types.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const int vocab = static_cast<int>(types.size());
  if (vocab < num_clusters) {
    throw Error("corpus has " + std::to_string(vocab) + " types, fewer than " +
                std::to_string(num_clusters) + " clusters");
  }

  std::unordered_map<std::string, int> word_id;
  for (int w = 0; w < vocab; ++w) word_id.emplace(types[static_cast<std::size_t>(w)].first, w);

  // Word-level bigram adjacency within sentences.
  std::vector<std::unordered_map<int, int64_t>> fwd(static_cast<std::size_t>(vocab));
  int64_t total_bigrams = 0;
  for (const auto& doc : corpus.documents) {
    for (const auto& sent : doc.sentences) {
      for (std::size_t i = 0; i + 1 < sent.tokens.size(); ++i) {
        int a = word_id[sent.tokens[i].form];
        int b = word_id[sent.tokens[i + 1].form];
        ++fwd[static_cast<std::size_t>(a)][b];
        ++total_bigrams;
      }
    }
  }
  std::vector<std::vector<std::pair<int, int64_t>>> fwd_list(static_cast<std::size_t>(vocab));
  std::vector<std::vector<std::pair<int, int64_t>>> bwd_list(static_cast<std::size_t>(vocab));
  for (int w = 0; w < vocab; ++w) {
    for (const auto& [x, c] : fwd[static_cast<std::size_t>(w)]) {
      fwd_list[static_cast<std::size_t>(w)].emplace_back(x, c);
      bwd_list[static_cast<std::size_t>(x)].emplace_back(w, c);
    }
  }

  const std::size_t cap = static_cast<std::size_t>(std::min(window, vocab)) + 1;
  detail::BrownState state(cap, total_bigrams);
  std::vector<int> assignment(static_cast<std::size_t>(vocab), -1);
  std::vector<std::vector<int>> members(cap);
  std::vector<int> active;      // ascending slot order
  std::vector<int> free_slots;  // descending, so back() is the smallest free slot
  for (int sl = static_cast<int>(cap) - 1; sl >= 0; --sl) free_slots.push_back(sl);

  auto insert_word = [&](int w) {
    int slot = free_slots.back();
    free_slots.pop_back();
    assignment[static_cast<std::size_t>(w)] = slot;
    members[static_cast<std::size_t>(slot)] = {w};
    for (const auto& [x, c] : fwd_list[static_cast<std::size_t>(w)]) {
      int sx = assignment[static_cast<std::size_t>(x)];
      if (sx < 0) continue;
      state.n(slot, sx) += c;
      state.add_left(slot, c);
      state.add_right(sx, c);
    }
    for (const auto& [x, c] : bwd_list[static_cast<std::size_t>(w)]) {
      if (x == w) continue;  // self bigram already counted via fwd
      int sx = assignment[static_cast<std::size_t>(x)];
      if (sx < 0) continue;
      state.n(sx, slot) += c;
      state.add_left(sx, c);
      state.add_right(slot, c);
    }
    active.insert(std::upper_bound(active.begin(), active.end(), slot), slot);
  };

  // Performs the best merge; returns (kept_slot, freed_slot).
  auto merge_best = [&](bool path_phase) -> std::pair<int, int> {
    std::vector<double> s(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) s[i] = state.s(active[i], active);
    double best = 0.0;
    int best_i = -1, best_j = -1;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        double loss = state.merge_loss(active[i], active[j], active, s[i], s[j]);
        if (best_i < 0 || loss < best) {
          best = loss;
          best_i = active[i];
          best_j = active[j];
        }
      }
    }
    if (trace) {
      BrownMergeRecord rec;
      rec.slot_a = best_i;
      rec.slot_b = best_j;
      rec.loss = best;
      rec.assignment = assignment;
      rec.active = active;
      rec.path_phase = path_phase;
      trace->push_back(std::move(rec));
    }
    state.fold(best_i, best_j);
    auto& into = members[static_cast<std::size_t>(best_i)];
    auto& from = members[static_cast<std::size_t>(best_j)];
    for (int w : from) assignment[static_cast<std::size_t>(w)] = best_i;
    into.insert(into.end(), from.begin(), from.end());
    from.clear();
    active.erase(std::find(active.begin(), active.end(), best_j));
    free_slots.push_back(best_j);
    std::sort(free_slots.begin(), free_slots.end(), std::greater<int>());
    return {best_i, best_j};
  };

  // Fill the window, then hold the active set at `window` clusters while the
  // remaining types are inserted, then shrink to the requested cluster count.
  const int initial = std::min(window, vocab);
  for (int w = 0; w < initial; ++w) insert_word(w);
  for (int w = initial; w < vocab; ++w) {
    insert_word(w);
    merge_best(false);
  }
  while (static_cast<int>(active.size()) > num_clusters) merge_best(false);

  // Final clusters in slot order.
  std::vector<int> cluster_of_word(static_cast<std::size_t>(vocab), -1);
  for (int ci = 0; ci < num_clusters; ++ci) {
    for (int w : members[static_cast<std::size_t>(active[static_cast<std::size_t>(ci)])]) {
      cluster_of_word[static_cast<std::size_t>(w)] = ci;
    }
  }

  // Continue the greedy merges down to one cluster; the resulting binary tree
  // over the C final clusters yields a prefix-free bit path per cluster.
  struct TreeNode {
    int left = -1, right = -1, leaf = -1;
  };
  std::vector<TreeNode> nodes;
  std::vector<int> node_of_slot(cap, -1);
  for (int ci = 0; ci < num_clusters; ++ci) {
    TreeNode leaf;
    leaf.leaf = ci;
    node_of_slot[static_cast<std::size_t>(active[static_cast<std::size_t>(ci)])] =
        static_cast<int>(nodes.size());
    nodes.push_back(leaf);
  }
  while (active.size() > 1) {
    auto [kept, freed] = merge_best(true);
    TreeNode parent;
    parent.left = node_of_slot[static_cast<std::size_t>(kept)];
    parent.right = node_of_slot[static_cast<std::size_t>(freed)];
    node_of_slot[static_cast<std::size_t>(kept)] = static_cast<int>(nodes.size());
    nodes.push_back(parent);
  }

  std::vector<std::string> paths(static_cast<std::size_t>(num_clusters));
  struct Frame {
    int node;
    std::string prefix;
  };
  std::vector<Frame> stack{{node_of_slot[static_cast<std::size_t>(active[0])], ""}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const TreeNode& nd = nodes[static_cast<std::size_t>(f.node)];
    if (nd.leaf >= 0) {
      paths[static_cast<std::size_t>(nd.leaf)] = f.prefix;
      continue;
    }
    stack.push_back({nd.left, f.prefix + "0"});
    stack.push_back({nd.right, f.prefix + "1"});
  }

  std::vector<BrownModel::Entry> entries;
  entries.reserve(static_cast<std::size_t>(vocab));
  for (int w = 0; w < vocab; ++w) {
    BrownModel::Entry e;
    e.word = types[static_cast<std::size_t>(w)].first;
    e.count = types[static_cast<std::size_t>(w)].second;
    e.cluster = cluster_of_word[static_cast<std::size_t>(w)];
    e.path = paths[static_cast<std::size_t>(e.cluster)];
    entries.push_back(std::move(e));
  }
  return BrownModel(num_clusters, std::move(entries));
}

// Cluster-path features for the five lexical window positions. Boundary
// symbols and unclustered words fall back to the UNK feature.
inline std::array<std::string, 5> brown_features(const BrownModel& model, const Instance& inst) {
  std::array<std::string, 5> out;
  for (int t = 0; t < 5; ++t) {
    out[static_cast<std::size_t>(t)] = model.path_feature(inst.active[static_cast<std::size_t>(t)]);
  }
  return out;
}

// `word<TAB>bit-path<TAB>count` records under the standard header.
inline void save_brown(const BrownModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "HISTADAPT brown v1\n";
  out << "clusters " << model.clusters() << "\n";
  out << "rows " << model.vocabulary_size() << "\n";
  for (const auto& e : model.entries()) {
    out << e.word << '\t' << e.path << '\t' << e.count << '\n';
  }
}

inline BrownModel load_brown(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "HISTADAPT brown v1") {
    throw Error("bad header in Brown model file: " + path);
  }
  int clusters = 0;
  std::size_t rows = 0;
  std::string word;
  in >> word >> clusters;
  in >> word >> rows;
  std::getline(in, line);
  std::vector<BrownModel::Entry> entries;
  entries.reserve(rows);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw Error("bad Brown model record: " + line);
    BrownModel::Entry e;
    e.word = cols[0];
    e.path = cols[1];
    e.count = std::stoll(cols[2]);
    e.cluster = -1;
    entries.push_back(std::move(e));
  }
  if (entries.size() != rows) throw Error("Brown model row count mismatch in " + path);
  return BrownModel(clusters, std::move(entries));
}

}  // namespace histadapt
