#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    if (!(cin >> n)) return 1;
    vector<int> spf(n + 1, 0);
    for (int i = 2; i <= n; i++)
        if (!spf[i])
            for (int j = i; j <= n; j += i)
                if (!spf[j]) spf[j] = i;
    mt19937_64 rng(20240917);
    vector<unsigned long long> prime_hash(n + 1, 0), fact(n + 1, 0);
    for (int i = 2; i <= n; i++)
        if (spf[i] == i) prime_hash[i] = rng();
    for (int i = 2; i <= n; i++) {
        unsigned long long f = 0;
        for (int m = i; m > 1;) {
            int p = spf[m], e = 0;
            while (m % p == 0) m /= p, e++;
            if (e & 1) f ^= prime_hash[p];
        }
        fact[i] = fact[i - 1] ^ f;
    }
    auto solve = [&](int lim, unsigned long long total, vector<int>& removed) {
        if (total == 0) return true;
        unordered_map<unsigned long long, int> where;
        where.reserve(lim * 2);
        for (int i = 1; i <= lim; i++) {
            if (fact[i] == total) {
                removed.push_back(i);
                return true;
            }
            where[fact[i]] = i;
        }
        for (int i = 1; i <= lim; i++) {
            auto it = where.find(fact[i] ^ total);
            if (it != where.end() && it->second != i) {
                removed.push_back(i);
                removed.push_back(it->second);
                return true;
            }
        }
        return false;
    };
    unsigned long long total = 0;
    for (int i = 1; i <= n; i++) total ^= fact[i];
    vector<int> removed;
    if (!solve(n, total, removed)) {
        removed.assign(1, n);
        solve(n - 1, total ^ fact[n], removed);
    }
    vector<char> gone(n + 1, 0);
    for (int r : removed) gone[r] = 1;
    string out = to_string(n - (int)removed.size()) + "\n";
    for (int i = 1; i <= n; i++)
        if (!gone[i]) out += to_string(i) + ' ';
    out += '\n';
    fwrite(out.data(), 1, out.size(), stdout);
}
