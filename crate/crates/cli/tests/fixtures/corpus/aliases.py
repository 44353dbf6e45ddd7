import numpy as np
import sklearn.metrics as skm
from os import path as osp
from .helpers import load_frames as lf
from tensorflow.keras import *

frames = lf(osp.join('data', 'frames'))
arr = np.asarray(frames)
net = Sequential()
net.add(Dense(10))
net.compile(optimizer='sgd')
net.fit(arr, arr)
skm.mean_squared_error(arr, net.predict(arr))
