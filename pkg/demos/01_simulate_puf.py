"""
Simulating an XOR arbiter PUF
=============================

Draw a PUF instance, look at the feature transform of a challenge and
check how evenly the responses split between 0 and 1.
"""
import numpy as np

from pufattack import generate_crp_set, sample_puf_instance, transform_challenge, xor_apuf_response

# a single 16-stage chain and a 4-way XOR of such chains
single = sample_puf_instance(16, 1, seed=1)
xor4 = sample_puf_instance(16, 4, seed=2)
print("delay matrix shapes:", single.chains.shape, xor4.chains.shape)

# the transform maps bits to +-1 suffix products with a constant +1 at the end
c = np.array([0, 1, 1, 0, 0, 0, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1], dtype=np.uint8)
phi = transform_challenge(c)
print("challenge:", "".join(map(str, c)))
print("phi      :", phi.astype(int))
print("response single / xor4:", xor_apuf_response(single, phi), xor_apuf_response(xor4, phi))

# response balance over many random challenges
for inst in (single, xor4):
    crps = generate_crp_set(inst, 20000, "learning", seed=3)
    print(f"{inst.k}x{inst.n}: fraction of ones {crps.responses.mean():.3f}")

# flipping the last challenge bit flips every feature except the constant
flipped = c.copy()
flipped[-1] ^= 1
print("features that change sign:", int(np.sum(transform_challenge(flipped) != phi)), "of", len(phi))
