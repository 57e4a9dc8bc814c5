#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simgym {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// --- clickstream ---

class MalformedLine : public Error {
public:
  MalformedLine(std::size_t line_no, const std::string& detail)
      : Error("malformed line " + std::to_string(line_no) + ": " + detail),
        line_no(line_no) {}
  std::size_t line_no;
};

class MissingField : public Error {
public:
  MissingField(std::string field, std::size_t line_no)
      : Error("line " + std::to_string(line_no) + ": missing field '" + field + "'"),
        field(std::move(field)), line_no(line_no) {}
  std::string field;
  std::size_t line_no;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

// --- clustering ---

class TooFewRows : public Error {
public:
  using Error::Error;
};

class UnknownCluster : public Error {
public:
  using Error::Error;
};

// --- persona ---

class EmptySummary : public Error {
public:
  using Error::Error;
};

class NoCategories : public Error {
public:
  using Error::Error;
};

class BackendUnavailable : public Error {
public:
  using Error::Error;
};

class UnknownProductRef : public Error {
public:
  explicit UnknownProductRef(const std::string& product_ref)
      : Error("unknown product_ref '" + product_ref + "'"), product_ref(product_ref) {}
  std::string product_ref;
};

class NoBrowsedProducts : public Error {
public:
  using Error::Error;
};

class ClusterMismatch : public Error {
public:
  using Error::Error;
};

// --- storefront ---

class SchemaViolation : public Error {
public:
  using Error::Error;
};

class CatalogMismatch : public Error {
public:
  using Error::Error;
};

class InvalidState : public Error {
public:
  using Error::Error;
};

// --- agent ---

class PolicyFailure : public Error {
public:
  using Error::Error;
};

// --- evaluation ---

class EmptyVariant : public Error {
public:
  using Error::Error;
};

class DegenerateVariance : public Error {
public:
  using Error::Error;
};

class ROutOfRange : public Error {
public:
  using Error::Error;
};

class InsufficientSessions : public Error {
public:
  using Error::Error;
};

class ModelMismatch : public Error {
public:
  using Error::Error;
};

class MissingShop : public Error {
public:
  explicit MissingShop(const std::string& shop_id)
      : Error("no session logs for ground-truth shop '" + shop_id + "'"), shop_id(shop_id) {}
  std::string shop_id;
};

// --- cli / config ---

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace simgym
