#include "recapc/ratings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "recapc/rng.hpp"

namespace recapc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

}  // namespace

RatingsTable load_ratings_csv(std::istream& in, double rating_max) {
  if (!(rating_max > 0.0)) throw ValidationError("rating_max must be positive");
  RatingsTable table;
  table.rating_max = rating_max;

  std::string line;
  if (!std::getline(in, line)) throw ParseError("ratings CSV is empty");
  {
    auto header = split_csv_line(strip(line));
    if (header.size() != 3 || strip(header[0]) != "user_id" || strip(header[1]) != "item_id" ||
        strip(header[2]) != "rating")
      throw ParseError("ratings CSV must start with header user_id,item_id,rating");
  }

  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string cleaned = strip(line);
    if (cleaned.empty()) continue;
    auto fields = split_csv_line(cleaned);
    if (fields.size() != 3)
      throw ParseError("ratings CSV line " + std::to_string(line_no) + " needs 3 fields");
    RatingsTable::Row row;
    row.user = strip(fields[0]);
    row.item = strip(fields[1]);
    try {
      std::size_t used = 0;
      row.rating = std::stod(strip(fields[2]), &used);
      if (used != strip(fields[2]).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError("ratings CSV line " + std::to_string(line_no) + ": bad rating value");
    }
    if (!(row.rating >= 1.0 && row.rating <= rating_max))
      throw ValidationError("rating outside [1, rating_max] at CSV line " + std::to_string(line_no));
    if (row.user.empty() || row.item.empty())
      throw ParseError("ratings CSV line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert({row.user, row.item}).second)
      throw ParseError("duplicate rating for (" + row.user + ", " + row.item + ")");
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw ValidationError("ratings CSV has no data rows");
  return table;
}

RatingsTable load_ratings_csv_file(const std::string& path, double rating_max) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ratings file: " + path);
  return load_ratings_csv(in, rating_max);
}

std::map<std::string, std::string> load_assignments_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open assignments file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("assignments CSV is empty: " + path);
  {
    auto header = split_csv_line(strip(line));
    if (header.size() != 2 || strip(header[0]) != "id" || strip(header[1]) != "cluster")
      throw ParseError("assignments CSV must start with header id,cluster: " + path);
  }
  std::map<std::string, std::string> assignments;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string cleaned = strip(line);
    if (cleaned.empty()) continue;
    auto fields = split_csv_line(cleaned);
    if (fields.size() != 2)
      throw ParseError("assignments CSV line " + std::to_string(line_no) + " needs 2 fields");
    std::string id = strip(fields[0]);
    std::string cluster = strip(fields[1]);
    if (id.empty() || cluster.empty())
      throw ParseError("assignments CSV line " + std::to_string(line_no) + ": empty field");
    if (!assignments.emplace(id, cluster).second)
      throw ParseError("duplicate assignment for id " + id);
  }
  return assignments;
}

namespace {

struct IndexedTable {
  std::vector<std::string> users;  // sorted unique
  std::vector<std::string> items;
  struct Entry {
    std::size_t user;
    std::size_t item;
    double rating;
  };
  std::vector<Entry> entries;
  // Per-user and per-item entry lists for the reassignment scans.
  std::vector<std::vector<std::size_t>> by_user;
  std::vector<std::vector<std::size_t>> by_item;
  double global_mean = 0.0;
};

IndexedTable index_table(const RatingsTable& table) {
  IndexedTable indexed;
  std::set<std::string> users, items;
  for (const auto& row : table.rows) {
    users.insert(row.user);
    items.insert(row.item);
  }
  indexed.users.assign(users.begin(), users.end());
  indexed.items.assign(items.begin(), items.end());
  auto user_index = [&](const std::string& u) {
    return static_cast<std::size_t>(
        std::lower_bound(indexed.users.begin(), indexed.users.end(), u) - indexed.users.begin());
  };
  auto item_index = [&](const std::string& i) {
    return static_cast<std::size_t>(
        std::lower_bound(indexed.items.begin(), indexed.items.end(), i) - indexed.items.begin());
  };
  indexed.by_user.resize(indexed.users.size());
  indexed.by_item.resize(indexed.items.size());
  double total = 0.0;
  for (const auto& row : table.rows) {
    IndexedTable::Entry entry{user_index(row.user), item_index(row.item), row.rating};
    indexed.by_user[entry.user].push_back(indexed.entries.size());
    indexed.by_item[entry.item].push_back(indexed.entries.size());
    indexed.entries.push_back(entry);
    total += row.rating;
  }
  indexed.global_mean = total / static_cast<double>(indexed.entries.size());
  return indexed;
}

struct BlockMeans {
  std::size_t item_clusters;
  std::size_t user_clusters;
  std::vector<double> mean;  // item cluster major
  std::vector<std::size_t> count;

  double& at(std::size_t ic, std::size_t uc) { return mean[ic * user_clusters + uc]; }
  double at(std::size_t ic, std::size_t uc) const { return mean[ic * user_clusters + uc]; }
};

BlockMeans compute_block_means(const IndexedTable& table, const std::vector<std::size_t>& user_of,
                               const std::vector<std::size_t>& item_of, std::size_t item_clusters,
                               std::size_t user_clusters) {
  BlockMeans blocks{item_clusters, user_clusters,
                    std::vector<double>(item_clusters * user_clusters, 0.0),
                    std::vector<std::size_t>(item_clusters * user_clusters, 0)};
  for (const auto& entry : table.entries) {
    std::size_t cell = item_of[entry.item] * user_clusters + user_of[entry.user];
    blocks.mean[cell] += entry.rating;
    blocks.count[cell] += 1;
  }
  for (std::size_t cell = 0; cell < blocks.mean.size(); ++cell)
    blocks.mean[cell] = blocks.count[cell] ? blocks.mean[cell] / double(blocks.count[cell])
                                           : table.global_mean;
  return blocks;
}

double block_objective(const IndexedTable& table, const std::vector<std::size_t>& user_of,
                       const std::vector<std::size_t>& item_of, const BlockMeans& blocks) {
  double j = 0.0;
  for (const auto& entry : table.entries) {
    double d = entry.rating - blocks.at(item_of[entry.item], user_of[entry.user]);
    j += d * d;
  }
  return j;
}

/// Moves a member into each empty cluster, taken from the largest cluster.
/// Returns the number of refills.
std::size_t refill_empty_clusters(std::vector<std::size_t>& assignment, std::size_t n_clusters) {
  std::vector<std::vector<std::size_t>> members(n_clusters);
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  std::size_t refills = 0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (!members[c].empty()) continue;
    std::size_t donor = 0;
    for (std::size_t d = 1; d < n_clusters; ++d)
      if (members[d].size() > members[donor].size()) donor = d;
    if (members[donor].size() < 2)
      throw EmptyClusterError("cannot keep every cluster non-empty: too few points");
    std::size_t moved = members[donor].back();
    members[donor].pop_back();
    members[c].push_back(moved);
    assignment[moved] = c;
    ++refills;
  }
  return refills;
}

}  // namespace

IngestResult ingest_ratings(const RatingsTable& table, const IngestOptions& options) {
  if (table.rows.empty()) throw ValidationError("ratings table is empty");
  if (!(table.rating_max > 0.0)) throw ValidationError("rating_max must be positive");
  for (const auto& row : table.rows)
    if (!(row.rating >= 1.0 && row.rating <= table.rating_max))
      throw ValidationError("rating outside [1, rating_max] for (" + row.user + ", " + row.item + ")");

  IndexedTable indexed = index_table(table);

  std::vector<std::size_t> user_of(indexed.users.size());
  std::vector<std::size_t> item_of(indexed.items.size());
  std::vector<std::string> type_names;
  std::vector<std::string> category_names;
  IngestResult result{Instance({"k1"}, {"m1"}, PrefMatrix(1, 1, 0.5), {1.0}), 0, 0.0, {}, 0};

  if (options.mode == IngestMode::ExternalAssignments) {
    // Cluster universe = labels of the users/items that actually rate;
    // sorted for determinism.
    std::set<std::string> user_labels, item_labels;
    for (std::size_t u = 0; u < indexed.users.size(); ++u) {
      auto it = options.user_assignments.find(indexed.users[u]);
      if (it == options.user_assignments.end())
        throw ValidationError("user without cluster assignment: " + indexed.users[u]);
      user_labels.insert(it->second);
    }
    for (std::size_t i = 0; i < indexed.items.size(); ++i) {
      auto it = options.item_assignments.find(indexed.items[i]);
      if (it == options.item_assignments.end())
        throw ValidationError("item without cluster assignment: " + indexed.items[i]);
      item_labels.insert(it->second);
    }
    type_names.assign(user_labels.begin(), user_labels.end());
    category_names.assign(item_labels.begin(), item_labels.end());
    auto label_index = [](const std::vector<std::string>& labels, const std::string& label) {
      return static_cast<std::size_t>(
          std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
    };
    for (std::size_t u = 0; u < indexed.users.size(); ++u)
      user_of[u] = label_index(type_names, options.user_assignments.at(indexed.users[u]));
    for (std::size_t i = 0; i < indexed.items.size(); ++i)
      item_of[i] = label_index(category_names, options.item_assignments.at(indexed.items[i]));
  } else {
    const std::size_t UC = options.n_user_clusters;
    const std::size_t IC = options.n_item_clusters;
    if (UC == 0 || IC == 0)
      throw ValidationError("k-means mode needs positive cluster counts");
    if (UC > indexed.users.size())
      throw EmptyClusterError("more user clusters than users");
    if (IC > indexed.items.size())
      throw EmptyClusterError("more item clusters than items");

    SplitMix64 g(derive_seed(options.seed, 0x1C));
    for (auto& c : user_of) c = g.next() % UC;
    for (auto& c : item_of) c = g.next() % IC;
    result.reseed_events += refill_empty_clusters(user_of, UC);
    result.reseed_events += refill_empty_clusters(item_of, IC);

    for (std::size_t iteration = 0; iteration < options.max_iterations; ++iteration) {
      bool changed = false;

      // Users move to the cluster minimizing their residual against the
      // current block means; then the same for items. Each scan can only
      // lower the objective, which is what makes the trace monotone.
      BlockMeans blocks = compute_block_means(indexed, user_of, item_of, IC, UC);
      for (std::size_t u = 0; u < indexed.users.size(); ++u) {
        std::size_t best = user_of[u];
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < UC; ++c) {
          double cost = 0.0;
          for (std::size_t e : indexed.by_user[u]) {
            const auto& entry = indexed.entries[e];
            double d = entry.rating - blocks.at(item_of[entry.item], c);
            cost += d * d;
          }
          if (cost < best_cost) {
            best_cost = cost;
            best = c;
          }
        }
        if (best != user_of[u]) {
          user_of[u] = best;
          changed = true;
        }
      }
      std::size_t refills = refill_empty_clusters(user_of, UC);

      blocks = compute_block_means(indexed, user_of, item_of, IC, UC);
      for (std::size_t i = 0; i < indexed.items.size(); ++i) {
        std::size_t best = item_of[i];
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < IC; ++c) {
          double cost = 0.0;
          for (std::size_t e : indexed.by_item[i]) {
            const auto& entry = indexed.entries[e];
            double d = entry.rating - blocks.at(c, user_of[entry.user]);
            cost += d * d;
          }
          if (cost < best_cost) {
            best_cost = cost;
            best = c;
          }
        }
        if (best != item_of[i]) {
          item_of[i] = best;
          changed = true;
        }
      }
      refills += refill_empty_clusters(item_of, IC);
      result.reseed_events += refills;

      blocks = compute_block_means(indexed, user_of, item_of, IC, UC);
      result.objective.push_back(block_objective(indexed, user_of, item_of, blocks));
      if (!changed && refills == 0) break;
    }

    type_names.resize(UC);
    category_names.resize(IC);
    for (std::size_t c = 0; c < UC; ++c) type_names[c] = "m" + std::to_string(c + 1);
    for (std::size_t c = 0; c < IC; ++c) category_names[c] = "k" + std::to_string(c + 1);
  }

  const std::size_t UC = type_names.size();
  const std::size_t IC = category_names.size();

  BlockMeans blocks = compute_block_means(indexed, user_of, item_of, IC, UC);
  result.impute_value = indexed.global_mean / table.rating_max;
  for (std::size_t cell = 0; cell < blocks.count.size(); ++cell)
    if (blocks.count[cell] == 0) ++result.imputed_cells;

  SplitMix64 noise(derive_seed(options.seed, 0x7E));
  PrefMatrix p(IC, UC);
  for (std::size_t k = 0; k < IC; ++k)
    for (std::size_t m = 0; m < UC; ++m) {
      double v = blocks.at(k, m) / table.rating_max;
      if (options.noise_std > 0.0) v += options.noise_std * noise.normal();
      p(k, m) = std::clamp(v, 0.01, 0.99);
    }

  std::vector<double> q(UC, 0.0);
  for (std::size_t u = 0; u < indexed.users.size(); ++u) q[user_of[u]] += 1.0;
  for (double& v : q) v /= static_cast<double>(indexed.users.size());
  for (std::size_t m = 0; m < UC; ++m)
    if (q[m] == 0.0) throw EmptyClusterError("user cluster has no members: " + type_names[m]);

  result.instance = Instance(std::move(category_names), std::move(type_names), std::move(p),
                             std::move(q));
  return result;
}

}  // namespace recapc
