# Regenerates pywt_reference.inc. Requires numpy and PyWavelets.
import numpy as np
import pywt

FAMILIES = [("kHaar", "haar"), ("kDb2", "db2"), ("kDb4", "db4"), ("kSym4", "sym4")]


def signal(n, phase):
    t = np.arange(n)
    return np.sin(0.37 * t + phase) + 0.25 * np.cos(1.9 * t) + 0.01 * t


def arr(v):
    return "{" + ", ".join("%.17g" % x for x in v) + "}"


def denoise(x, name, levels):
    coeffs = pywt.wavedec(x, name, mode="symmetric", level=levels)
    sigma = np.median(np.abs(coeffs[-1])) / 0.6745
    thr = sigma * np.sqrt(2 * np.log(len(x)))
    coeffs = [coeffs[0]] + [pywt.threshold(c, thr, mode="soft") for c in coeffs[1:]]
    return pywt.waverec(coeffs, name, mode="symmetric")[: len(x)]


out = ["// Generated by gen_pywt_reference.py (PyWavelets %s, mode=symmetric)." % pywt.__version__]
x13 = signal(13, 0.3)
x64 = signal(64, 1.1) + 0.3 * np.random.default_rng(5).normal(size=64)
out.append("inline const std::vector<double> kRefInput13 = %s;" % arr(x13))
out.append("inline const std::vector<double> kRefInput64 = %s;" % arr(x64))
out.append("struct RefDwt { wiq::WaveletFamily family; std::vector<double> approx, detail; };")
out.append("inline const std::vector<RefDwt> kRefDwt13 = {")
for fam, name in FAMILIES:
    a, d = pywt.dwt(x13, name, mode="symmetric")
    out.append("  {wiq::WaveletFamily::%s, %s, %s}," % (fam, arr(a), arr(d)))
out.append("};")
out.append("struct RefDenoise { wiq::WaveletFamily family; int levels; std::vector<double> samples; };")
out.append("inline const std::vector<RefDenoise> kRefDenoise64 = {")
for fam, name in FAMILIES:
    out.append("  {wiq::WaveletFamily::%s, 3, %s}," % (fam, arr(denoise(x64, name, 3))))
out.append("};")
open(__file__.replace("gen_pywt_reference.py", "pywt_reference.inc"), "w").write("\n".join(out) + "\n")
