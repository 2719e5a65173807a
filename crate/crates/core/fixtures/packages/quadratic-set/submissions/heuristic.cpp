#include <bits/stdc++.h>
using namespace std;

// The reference judge builds with a 32-bit `unsigned long` (LLP64); the fixed
// width types keep that arithmetic on any host.

bool is_perfect_square(unsigned long long int n) {
  if (pow((int32_t)(sqrt(n)), 2) == n) {
    return true;
  }
  return false;
}

void solve() {
  uint32_t n;
  cin >> n;
  vector<uint32_t> arr = {};
  uint32_t halfi = (int32_t)n / 2;

  unsigned long long int asdf = (unsigned long long int)2 * (halfi) * (halfi - 1);

  if (remainderf(n, 4) == 0) {
    arr = {halfi};
  } else if (n == 1) {
    arr = {};
  } else if (remainderf(n, 4) == 1) {
    arr = {halfi, n};
  } else if ((n % 4) == 2) {
    if (is_perfect_square((unsigned long long int)(n + 2)))
      arr = {halfi + 1};
    else if (is_perfect_square((unsigned long long int)(n * (halfi - 1))))
      arr = {halfi - 2};
    else
      arr = {halfi, 2};
  } else {
    if (is_perfect_square((unsigned long long int)(n + 1)))
      arr = {halfi + 1, n};
    else if (is_perfect_square(asdf))
      arr = {n, halfi - 2};
    else if (is_perfect_square((halfi - 1) * n))
      arr = {halfi - 2, n - 2};
    else
      arr = {2, halfi, n};
  }

  vector<int> ans = {};
  for (int i = 1; i < n + 1; i++) {
    if (find(arr.begin(), arr.end(), i) == arr.end()) ans.push_back(i);
  }
  cout << ans.size() << endl;
  for (int el = 0; el < ans.size(); el++) {
    cout << ans[el] << ' ';
  }
  cout << endl;
}

int main() {
  solve();
  return 0;
}
