#include <bits/stdc++.h>
using namespace std;

const long long MOD = 998244353;
const long long BASE = 131;

long long hash_of(const string& s) {
    long long h = 0;
    for (char c : s) h = (h * BASE + (c - 'a' + 1)) % MOD;
    return h;
}

int main() {
    ios::sync_with_stdio(false);
    cin.tie(nullptr);
    int n;
    cin >> n;
    unordered_set<long long> seen;
    for (int i = 0; i < n; i++) {
        string s;
        cin >> s;
        seen.insert(hash_of(s));
    }
    cout << seen.size() << "\n";
}
