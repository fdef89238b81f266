#include <cstdio>

int main() {
  std::fprintf(stderr, "relent: CLI not wired up yet\n");
  return 1;
}
