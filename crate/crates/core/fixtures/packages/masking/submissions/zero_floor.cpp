// Starts the running maximum at 0, so an all-negative array prints 0.
#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    cin >> n;
    assert(n >= 1);
    vector<long long> a(n);
    for (auto& x : a) cin >> x;
    long long best = 0;
    for (auto x : a) best = max(best, x);
    cout << best << "\n";
}
