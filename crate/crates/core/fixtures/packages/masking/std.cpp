// Prints the maximum of n integers.
#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    cin >> n;
    long long best = LLONG_MIN;
    for (int i = 0; i < n; i++) {
        long long x;
        cin >> x;
        best = max(best, x);
    }
    cout << best << "\n";
}
