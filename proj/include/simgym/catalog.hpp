#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/errors.hpp"

namespace simgym {

struct Product {
  std::string product_ref;
  std::string name;
  double price = 0.0;
  std::string category;
  std::vector<std::string> keywords;
  double quality_score = 0.0; // in [0,1]

  bool operator==(const Product&) const = default;
};

inline void to_json(nlohmann::json& j, const Product& p) {
  j = nlohmann::json{{"product_ref", p.product_ref}, {"name", p.name},
                     {"price", p.price},             {"category", p.category},
                     {"keywords", p.keywords},       {"quality_score", p.quality_score}};
}

inline void from_json(const nlohmann::json& j, Product& p) {
  j.at("product_ref").get_to(p.product_ref);
  j.at("name").get_to(p.name);
  j.at("price").get_to(p.price);
  j.at("category").get_to(p.category);
  if (j.contains("keywords")) j.at("keywords").get_to(p.keywords);
  if (j.contains("quality_score")) j.at("quality_score").get_to(p.quality_score);
}

// Product lookup plus per-category price medians, which back the
// category-aware price normalization used by archetype scoring.
class ProductCatalog {
public:
  ProductCatalog() = default;

  explicit ProductCatalog(std::vector<Product> products) : products_(std::move(products)) {
    std::map<std::string, std::vector<double>> by_category;
    for (std::size_t i = 0; i < products_.size(); ++i) {
      index_[products_[i].product_ref] = i;
      by_category[products_[i].category].push_back(products_[i].price);
    }
    for (auto& [category, prices] : by_category) {
      std::sort(prices.begin(), prices.end());
      const std::size_t n = prices.size();
      const double median =
          (n % 2 == 1) ? prices[n / 2] : 0.5 * (prices[n / 2 - 1] + prices[n / 2]);
      category_median_[category] = median;
    }
  }

  const std::vector<Product>& products() const { return products_; }

  bool contains(const std::string& product_ref) const { return index_.count(product_ref) > 0; }

  const Product& at(const std::string& product_ref) const {
    auto it = index_.find(product_ref);
    if (it == index_.end()) throw UnknownProductRef(product_ref);
    return products_[it->second];
  }

  // Median price of the product's category; 1.0 for unpriced categories so
  // normalization stays well defined.
  double category_median(const std::string& category) const {
    auto it = category_median_.find(category);
    if (it == category_median_.end() || it->second <= 0.0) return 1.0;
    return it->second;
  }

  double normalized_price(const Product& p) const {
    return p.price / category_median(p.category);
  }

private:
  std::vector<Product> products_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, double> category_median_;
};

inline ProductCatalog parse_catalog(const nlohmann::json& doc) {
  if (!doc.is_array()) throw SchemaViolation("catalog document must be a JSON array of products");
  std::vector<Product> products;
  for (const auto& item : doc) products.push_back(item.get<Product>());
  return ProductCatalog(std::move(products));
}

} // namespace simgym
