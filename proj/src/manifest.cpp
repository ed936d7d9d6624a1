#include "sphdesign/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <openssl/evp.h>

namespace sphd {

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return git_blob_hash(content);
}

void RunManifest::seal() {
  nlohmann::json canon = {{"command", command}, {"seed", seed}, {"parameters", parameters}};
  nlohmann::json files = nlohmann::json::array();
  std::vector<std::string> all = inputs;
  if (!config_path.empty()) all.insert(all.begin(), config_path);
  for (const auto& p : all) {
    const std::filesystem::path fp(p);
    files.push_back({fp.filename().string(), git_blob_hash_file(fp)});
    const auto env = fp.extension() == ".csv" ? std::filesystem::path(fp).replace_extension(".json") : fp;
    if (env != fp && std::filesystem::exists(env)) files.push_back({env.filename().string(), git_blob_hash_file(env)});
  }
  canon["inputs"] = files;
  hash = git_blob_hash(canon.dump());
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"config", config_path}, {"inputs", inputs}, {"outputs", outputs},
          {"seed", seed},       {"parameters", parameters}, {"hash", hash}};
}

}  // namespace sphd
