#include <sodium.h>

#include <algorithm>

#include "uavlabel/error.hpp"
#include "uavlabel/store.hpp"

namespace uavlabel {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AccountRole r) { return r == AccountRole::Admin ? "Admin" : "Labeler"; }

AccountRole account_role_from_string(std::string_view s) {
  if (s == "Admin" || s == "admin") return AccountRole::Admin;
  if (s == "Labeler" || s == "labeler") return AccountRole::Labeler;
  fail(ErrorKind::Validation, "bad_role", "account role must be admin or labeler");
}

namespace {

void init_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) fail(ErrorKind::Io, "sodium_init", "libsodium failed to initialise");
}

void reject_credentials() {
  fail(ErrorKind::Unauthenticated, "bad_credentials", "invalid username or password");
}

}  // namespace

AccountStore::AccountStore(fs::path file, AccountOptions options)
    : file_(std::move(file)), options_(std::move(options)) {
  init_sodium();
  if (options_.hash_ops_limit == 0) options_.hash_ops_limit = crypto_pwhash_OPSLIMIT_INTERACTIVE;
  if (options_.hash_mem_limit == 0) options_.hash_mem_limit = crypto_pwhash_MEMLIMIT_INTERACTIVE;
  dummy_hash_ = hash_password("no-such-user");
}

std::string AccountStore::hash_password(const std::string& password) const {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), options_.hash_ops_limit,
                        options_.hash_mem_limit) != 0) {
    fail(ErrorKind::Io, "hash_failed", "password hashing ran out of memory");
  }
  return out;
}

std::vector<AccountStore::Record> AccountStore::read_records() const {
  std::vector<Record> out;
  if (!fs::exists(file_)) return out;
  const json j = json::parse(read_text_file(file_));
  for (const auto& a : j.at("accounts")) {
    out.push_back({{a.at("account_id").get<std::string>(), a.at("username").get<std::string>(),
                    account_role_from_string(a.at("role").get<std::string>())},
                   a.at("password_hash").get<std::string>()});
  }
  return out;
}

void AccountStore::write_records(const std::vector<Record>& records) const {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"account_id", r.info.account_id},
                   {"username", r.info.username},
                   {"role", to_string(r.info.role)},
                   {"password_hash", r.password_hash}});
  }
  write_file_atomically(file_, json{{"accounts", arr}}.dump(2) + "\n");
}

AccountInfo AccountStore::add_user(const std::string& username, const std::string& password,
                                   AccountRole role) {
  if (username.empty() || username.find_first_of(",;/\\ \t\n") != std::string::npos) {
    fail(ErrorKind::Validation, "bad_username", "usernames must be non-empty without separators or spaces");
  }
  if (password.size() < 8) fail(ErrorKind::Validation, "weak_password", "passwords need at least 8 characters");

  std::lock_guard lock(mutex_);
  auto records = read_records();
  if (std::any_of(records.begin(), records.end(), [&](const Record& r) { return r.info.username == username; })) {
    fail(ErrorKind::Conflict, "username_taken", "username " + username + " already exists");
  }
  Record rec{{username, username, role}, hash_password(password)};
  records.push_back(rec);
  write_records(records);
  return rec.info;
}

void AccountStore::remove_user(const std::string& username) {
  std::lock_guard lock(mutex_);
  auto records = read_records();
  const auto it = std::remove_if(records.begin(), records.end(),
                                 [&](const Record& r) { return r.info.username == username; });
  if (it == records.end()) fail(ErrorKind::NotFound, "no_such_user", "no user " + username);
  records.erase(it, records.end());
  write_records(records);
  std::erase_if(sessions_, [&](const auto& kv) { return kv.second.account_id == username; });
}

std::vector<AccountInfo> AccountStore::list() const {
  std::lock_guard lock(mutex_);
  std::vector<AccountInfo> out;
  for (const auto& r : read_records()) out.push_back(r.info);
  return out;
}

std::optional<AccountInfo> AccountStore::find(const AccountId& id) const {
  std::lock_guard lock(mutex_);
  for (const auto& r : read_records()) {
    if (r.info.account_id == id) return r.info;
  }
  return std::nullopt;
}

Session AccountStore::authenticate(const std::string& username, const std::string& password) {
  std::vector<Record> records;
  {
    std::lock_guard lock(mutex_);
    records = read_records();
  }
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const Record& r) { return r.info.username == username; });
  // Verify against a dummy hash for unknown users so both failures cost the same.
  const std::string& hash = it != records.end() ? it->password_hash : dummy_hash_;
  const bool ok = crypto_pwhash_str_verify(hash.c_str(), password.data(), password.size()) == 0;
  if (!ok || it == records.end()) reject_credentials();

  unsigned char raw[32];
  randombytes_buf(raw, sizeof raw);
  char hex[sizeof raw * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, raw, sizeof raw);

  std::lock_guard lock(mutex_);
  sessions_[hex] = {it->info.account_id, options_.clock()};
  return {hex, it->info};
}

AccountInfo AccountStore::resolve(const std::string& token) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) {
    fail(ErrorKind::Unauthenticated, "invalid_session", "missing or unknown session token");
  }
  const auto now = options_.clock();
  if (now - it->second.last_seen > options_.idle_timeout) {
    sessions_.erase(it);
    fail(ErrorKind::Unauthenticated, "session_expired", "session expired");
  }
  it->second.last_seen = now;
  for (const auto& r : read_records()) {
    if (r.info.account_id == it->second.account_id) return r.info;
  }
  sessions_.erase(it);
  fail(ErrorKind::Unauthenticated, "invalid_session", "account no longer exists");
}

void AccountStore::logout(const std::string& token) {
  std::lock_guard lock(mutex_);
  sessions_.erase(token);
}

}  // namespace uavlabel
