#include "recapc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace recapc {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

Instance::Instance(std::vector<std::string> categories, std::vector<std::string> types,
                   PrefMatrix p, std::vector<double> q)
    : categories_(std::move(categories)), types_(std::move(types)), p_(std::move(p)), q_(std::move(q)) {
  require(!categories_.empty(), "instance needs at least one category");
  require(!types_.empty(), "instance needs at least one type");
  require(p_.rows() == categories_.size() && p_.cols() == types_.size(),
          "P must be |categories| x |types|");
  require(q_.size() == types_.size(), "q must have one entry per type");

  std::set<std::string> seen;
  for (const auto& name : categories_)
    require(seen.insert(name).second, "duplicate category name: " + name);
  seen.clear();
  for (const auto& name : types_)
    require(seen.insert(name).second, "duplicate type name: " + name);

  for (std::size_t k = 0; k < p_.rows(); ++k)
    for (std::size_t m = 0; m < p_.cols(); ++m) {
      double v = p_(k, m);
      require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
              "P entry out of [0, 1] at (" + categories_[k] + ", " + types_[m] + ")");
    }

  double q_sum = 0.0;
  for (double v : q_) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, "q entry out of [0, 1]");
    q_sum += v;
  }
  require(std::abs(q_sum - 1.0) <= 1e-6, "q must sum to 1 within 1e-6");

  // Drop types the prior rules out entirely; they can never influence a
  // posterior and keeping them would break the strictly-positive invariant.
  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < q_.size(); ++m)
    if (q_[m] != 0.0) keep.push_back(m);
  require(!keep.empty(), "prior has no support");
  if (keep.size() != q_.size()) {
    std::vector<std::string> types2;
    std::vector<double> q2;
    PrefMatrix p2(p_.rows(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
      types2.push_back(types_[keep[j]]);
      q2.push_back(q_[keep[j]]);
      for (std::size_t k = 0; k < p_.rows(); ++k) p2(k, j) = p_(k, keep[j]);
    }
    types_ = std::move(types2);
    q_ = std::move(q2);
    p_ = std::move(p2);
  }

  double total = 0.0;
  for (double v : q_) total += v;
  for (double& v : q_) v /= total;

  p_max_ = 0.0;
  for (double v : p_.data()) p_max_ = std::max(p_max_, v);
  if (p_max_ >= 1.0)
    throw InfiniteWelfareError(
        "a like-probability of 1 on a type with positive prior makes expected "
        "session length unbounded");

  ratio_ = PrefMatrix(p_.rows(), p_.cols());
  best_ratio_.assign(p_.cols(), 0.0);
  for (std::size_t k = 0; k < p_.rows(); ++k)
    for (std::size_t m = 0; m < p_.cols(); ++m) {
      double v = p_(k, m);
      ratio_(k, m) = v / (1.0 - v);
      best_ratio_[m] = std::max(best_ratio_[m], ratio_(k, m));
    }
}

std::size_t Instance::category_index(const std::string& name) const {
  auto it = std::find(categories_.begin(), categories_.end(), name);
  if (it == categories_.end()) throw ValidationError("unknown category: " + name);
  return static_cast<std::size_t>(it - categories_.begin());
}

Instance load_instance(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");

  static const std::set<std::string> known = {"categories", "types", "P", "q"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw ParseError("unknown key in instance document: " + item.key());
  }
  for (const auto& key : known) {
    if (!doc.contains(key)) throw ParseError("instance document missing key: " + key);
  }

  try {
    auto categories = doc.at("categories").get<std::vector<std::string>>();
    auto types = doc.at("types").get<std::vector<std::string>>();
    auto rows = doc.at("P").get<std::vector<std::vector<double>>>();
    auto q = doc.at("q").get<std::vector<double>>();

    if (rows.size() != categories.size())
      throw ValidationError("P must have one row per category");
    PrefMatrix p(categories.size(), types.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != types.size())
        throw ValidationError("P row has wrong length at category index " + std::to_string(k));
      for (std::size_t m = 0; m < types.size(); ++m) p(k, m) = rows[k][m];
    }
    return Instance(std::move(categories), std::move(types), std::move(p), std::move(q));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance document has wrong field types: ") + e.what());
  }
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_instance(buffer.str());
}

std::string instance_to_json(const Instance& instance) {
  nlohmann::ordered_json doc;
  doc["categories"] = instance.categories();
  doc["types"] = instance.types();
  auto& p = doc["P"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < instance.n_categories(); ++k) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t m = 0; m < instance.n_types(); ++m) row.push_back(instance.p(k, m));
    p.push_back(std::move(row));
  }
  doc["q"] = instance.prior();
  return doc.dump(2) + "\n";
}

}  // namespace recapc
