"""Núcleo numérico: kernels, teste KCI, LP, randomização, SEM e remoção de viés"""
