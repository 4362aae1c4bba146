#include "ablp/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ablp/parallel.hpp"
#include "ablp/seeding.hpp"

namespace ablp {

std::size_t FeatureConfig::block_length() const {
  const auto sa = static_cast<std::size_t>(a);
  const auto sb = static_cast<std::size_t>(b);
  return sa + sa * sa * sb;
}

void FeatureConfig::validate() const {
  if (a < 1) throw std::invalid_argument("a must be >= 1");
  if (b < 0) throw std::invalid_argument("b must be >= 0");
}

namespace {

const FeatureConfig& validated(const FeatureConfig& config) {
  config.validate();
  return config;
}

}  // namespace

FeatureExtractor::FeatureExtractor(const Graph& g, const FeatureConfig& config)
    : graph_(&g), config_(validated(config)), order_(g, config.neighbor_strategy()) {}

FeatureExtractor::FeatureExtractor(const Graph& g, const FeatureConfig& config, const CentralityTable& table)
    : graph_(&g), config_(validated(config)), order_(g, config.neighbor_strategy(), table) {}

void FeatureExtractor::build_block(NodeId root, NodeId partner, std::span<NodeId> out, Scratch& scratch) const {
  if (++scratch.generation_ == 0) {
    std::fill(scratch.stamp_.begin(), scratch.stamp_.end(), 0);
    scratch.generation_ = 1;
  }
  const std::uint32_t gen = scratch.generation_;
  auto& stamp = scratch.stamp_;
  const auto a = static_cast<std::size_t>(config_.a);
  const bool mask = config_.mask_pair_edge;

  stamp[root] = gen;

  // Writes up to `a` unvisited ordered neighbors of `node` at out[pos..pos+a),
  // zero-padding the remainder. Padding slots have no neighbors.
  auto expand = [&](NodeId node, std::size_t pos) {
    std::size_t k = 0;
    if (node != kPadding) {
      for (NodeId w : order_.of(node)) {
        if (k == a) break;
        if (mask && ((node == root && w == partner) || (node == partner && w == root))) continue;
        if (stamp[w] == gen) continue;
        stamp[w] = gen;
        out[pos + k++] = w;
      }
    }
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(pos + k),
              out.begin() + static_cast<std::ptrdiff_t>(pos + a), kPadding);
  };

  expand(root, 0);
  // Round i (1-based) expands the i-th group of a entries of the list so far.
  for (std::size_t round = 1; round <= static_cast<std::size_t>(config_.b); ++round) {
    for (std::size_t j = 0; j < a; ++j) {
      const std::size_t source = (round - 1) * a + j;
      expand(out[source], a + source * a);
    }
  }
}

int FeatureExtractor::extract_into(NodeId u, NodeId v, std::span<NodeId> out, Scratch& scratch) const {
  if (u == v) throw std::invalid_argument("pair endpoints must differ");
  const bool present = graph_->has_edge(u, v);  // validates IDs
  const std::size_t block = config_.block_length();
  if (out.size() != 2 * block + 2) throw std::invalid_argument("output row has wrong length");
  build_block(u, v, out.subspan(0, block), scratch);
  build_block(v, u, out.subspan(block, block), scratch);
  out[2 * block] = u;
  out[2 * block + 1] = v;
  return present ? 1 : 0;
}

PairRow FeatureExtractor::extract(NodeId u, NodeId v) const {
  PairRow row;
  row.x.resize(config_.row_length());
  auto scratch = make_scratch();
  row.y = extract_into(u, v, row.x, scratch);
  row.u = u;
  row.v = v;
  return row;
}

PairRow create_pair_features(const Graph& g, NodeId u, NodeId v, const FeatureConfig& config,
                             const CentralityTable* table) {
  if (const auto measure = measure_of(config.strategy)) {
    if (table == nullptr) throw std::invalid_argument("ranked strategy requires a centrality table");
    return FeatureExtractor(g, config, *table).extract(u, v);
  }
  return FeatureExtractor(g, config).extract(u, v);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.config = config;
  out.width = width;
  out.features.reserve(indices.size() * width);
  out.labels.reserve(indices.size());
  out.pairs.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels.at(i));
    out.pairs.push_back(pairs.at(i));
    (labels[i] ? out.positive_count : out.negative_count) += 1;
  }
  return out;
}

Dataset build_dataset(const Graph& g, const FeatureConfig& config, std::size_t threads) {
  const FeatureExtractor extractor(g, config);
  Dataset d;
  d.config = config;
  d.width = config.row_length();
  d.pairs = candidate_pairs(g);
  d.features.assign(d.pairs.size() * d.width, kPadding);
  d.labels.assign(d.pairs.size(), 0);

  parallel_for(d.pairs.size(), threads, [&](std::size_t begin, std::size_t end) {
    auto scratch = extractor.make_scratch();
    for (std::size_t i = begin; i < end; ++i) {
      std::span<NodeId> out(d.features.data() + i * d.width, d.width);
      d.labels[i] = static_cast<std::uint8_t>(extractor.extract_into(d.pairs[i].first, d.pairs[i].second, out, scratch));
    }
  });
  d.positive_count = static_cast<std::size_t>(std::count(d.labels.begin(), d.labels.end(), 1));
  d.negative_count = d.rows() - d.positive_count;
  return d;
}

Dataset balance(const Dataset& d, double negative_ratio, std::uint64_t seed) {
  if (!(negative_ratio > 0.0)) throw std::invalid_argument("negative ratio must be > 0");
  if (d.positive_count == 0) throw DataError("cannot balance a dataset without positive rows");

  std::vector<std::size_t> keep;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < d.rows(); ++i) (d.labels[i] ? keep : negatives).push_back(i);

  const double wanted = std::floor(negative_ratio * static_cast<double>(d.positive_count));
  const std::size_t target = wanted >= static_cast<double>(negatives.size())
                                 ? negatives.size()
                                 : static_cast<std::size_t>(wanted);
  // Partial Fisher-Yates: the first `target` slots become the sample.
  Engine engine(derive_seed(seed, 0xba1a9ce));
  for (std::size_t i = 0; i < target; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(engine, negatives.size() - i));
    std::swap(negatives[i], negatives[j]);
  }
  keep.insert(keep.end(), negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(target));
  std::sort(keep.begin(), keep.end());
  return d.subset(keep);
}

Split split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test fraction must be in (0, 1)");
  if (d.rows() == 0) throw DataError("cannot split an empty dataset");

  std::vector<std::size_t> train_idx, test_idx;
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      if (d.labels[i] == cls) members.push_back(i);
    }
    if (members.size() < 2) {
      throw DataError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                      " rows; stratified split needs at least 2");
    }
    Engine engine(derive_seed(seed, 0x5b117, cls));
    shuffle(std::span<std::size_t>(members), engine);
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    take = std::clamp<std::size_t>(take, 1, members.size() - 1);
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return Split{d.subset(train_idx), d.subset(test_idx), test_fraction, seed};
}

void write_dataset_csv(const Dataset& d, const Graph& g, std::ostream& out) {
  out << "u,v,y";
  for (std::size_t k = 1; k + 2 <= d.width; ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < d.rows(); ++i) {
    out << g.label(d.pairs[i].first) << ',' << g.label(d.pairs[i].second) << ',' << int{d.labels[i]};
    const auto r = d.row(i);
    for (std::size_t k = 0; k + 2 < r.size(); ++k) out << ',' << r[k];
    out << '\n';
  }
}

}  // namespace ablp
