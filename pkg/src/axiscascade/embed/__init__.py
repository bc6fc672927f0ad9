"""
Word vectors, document embeddings, cosine similarity, standardization, and
the encoder that builds stage inputs.
"""
